//! Block-fading channel models for Monte Carlo trials.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::signals::SampleStream;
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChannelKind {
    #[serde(rename = "awgn")]
    Awgn,
    #[serde(rename = "rayleigh_flat")]
    RayleighFlat,
    #[serde(rename = "rayleigh_2tap")]
    Rayleigh2Tap,
    #[serde(rename = "rician")]
    Rician,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Awgn => "awgn",
            Self::RayleighFlat => "rayleigh_flat",
            Self::Rayleigh2Tap => "rayleigh_2tap",
            Self::Rician => "rician",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [Self::Awgn, Self::RayleighFlat, Self::Rayleigh2Tap, Self::Rician]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown channel kind '{s}'")))
    }
}

/// Channel model and SNR. For `rician` the SNR refers to the constant part,
/// for `rayleigh_2tap` it is per path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub snr_db: f64,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default = "default_tap_separation")]
    pub tap_separation: usize,
}

fn default_tap_separation() -> usize {
    1
}

impl ChannelSpec {
    pub fn new(kind: ChannelKind, snr_db: f64) -> Self {
        Self { kind, snr_db, kappa: None, tap_separation: 1 }
    }

    pub fn rician(snr_db: f64, kappa: f64) -> Self {
        Self { kappa: Some(kappa), ..Self::new(ChannelKind::Rician, snr_db) }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.kind, self.kappa) {
            (ChannelKind::Rician, None) => return Err(Error::MissingParameter("kappa")),
            (ChannelKind::Rician, Some(k)) if !(k > 0.0) => {
                return Err(Error::InvalidArgument(format!("kappa must be positive, got {k}")))
            }
            _ => {}
        }
        if self.kind == ChannelKind::Rayleigh2Tap && self.tap_separation == 0 {
            return Err(Error::InvalidArgument("tap separation must be at least 1".into()));
        }
        if self.snr_db.is_nan() {
            return Err(Error::InvalidArgument("snr_db is NaN".into()));
        }
        Ok(())
    }

    /// Linear SNR `mu`.
    pub fn snr_linear(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }

    /// Noise variance for unit signal scale: `1 / mu` (zero at infinite SNR).
    pub fn noise_variance(&self) -> f64 {
        if self.snr_db == f64::INFINITY {
            0.0
        } else {
            1.0 / self.snr_linear()
        }
    }

    /// Delay of the last path relative to the first.
    pub fn extra_delay(&self) -> usize {
        match self.kind {
            ChannelKind::Rayleigh2Tap => self.tap_separation,
            _ => 0,
        }
    }
}

/// Seed of one trial. Each trial uses its own ChaCha stream, so a trial
/// reproduces regardless of which worker runs it or in what order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrialSeed {
    pub base_seed: u64,
    pub trial_index: u64,
}

impl TrialSeed {
    pub fn new(base_seed: u64, trial_index: u64) -> Self {
        Self { base_seed, trial_index }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.base_seed);
        rng.set_stream(self.trial_index);
        rng
    }
}

/// Circularly symmetric complex Gaussian with total variance `var`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Output of one channel draw.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    /// Noise-only history followed by the `2N`-sample observation.
    pub received: SampleStream,
    pub history_len: usize,
    /// Preamble start within the observation.
    pub lag: usize,
    /// Drawn amplitude per path.
    pub amplitudes: Vec<Complex64>,
    pub noise_variance: f64,
}

impl Realization {
    pub fn observation(&self) -> &[Complex64] {
        &self.received.samples[self.history_len..]
    }
}

/// Places `s` at a uniformly drawn lag in a `2N`-sample observation, applies
/// the channel and adds noise. Returns the observation, the true lag and the
/// path amplitudes.
pub fn apply(spec: &ChannelSpec, s: &SampleStream, seed: TrialSeed) -> Result<(SampleStream, usize, Vec<Complex64>)> {
    let r = apply_with_history(spec, s, seed, 0)?;
    Ok((r.received, r.lag, r.amplitudes))
}

/// As [`apply`], with `history` noise-only samples in front of the
/// observation for power estimation. Observation draws do not depend on
/// `history`, and the same seed gives the same lag, fading and unit noise
/// at every SNR.
pub fn apply_with_history(spec: &ChannelSpec, s: &SampleStream, seed: TrialSeed, history: usize) -> Result<Realization> {
    spec.validate()?;
    let n = s.len();
    if n == 0 {
        return Err(Error::EmptyInput("preamble"));
    }
    let extra = spec.extra_delay();
    if extra >= n {
        return Err(Error::InvalidArgument(format!("tap separation {extra} not below preamble length {n}")));
    }
    let mut rng = seed.rng();
    let lag = rng.random_range(0..n - extra);
    let amplitudes = match spec.kind {
        ChannelKind::Awgn => vec![Complex64::new(1.0, 0.0)],
        ChannelKind::RayleighFlat => vec![complex_gaussian(&mut rng, 1.0)],
        ChannelKind::Rayleigh2Tap => vec![complex_gaussian(&mut rng, 1.0), complex_gaussian(&mut rng, 1.0)],
        ChannelKind::Rician => {
            let kappa = spec.kappa.ok_or(Error::MissingParameter("kappa"))?;
            vec![Complex64::new(1.0, 0.0) + complex_gaussian(&mut rng, 1.0 / kappa)]
        }
    };
    let delays = [0, extra];
    let var = spec.noise_variance();
    let mut obs: Vec<Complex64> = (0..2 * n).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
    let scale = var.sqrt();
    for v in &mut obs {
        *v *= scale;
    }
    for (a, d) in amplitudes.iter().zip(delays) {
        for (i, sv) in s.samples.iter().enumerate() {
            obs[lag + d + i] += a * sv;
        }
    }
    let mut received: Vec<Complex64> = (0..history).map(|_| complex_gaussian(&mut rng, 1.0) * scale).collect();
    received.extend(obs);
    Ok(Realization {
        received: SampleStream { samples: received, rate: s.rate },
        history_len: history,
        lag,
        amplitudes,
        noise_variance: var,
    })
}

/// Unit-variance complex white noise for false-alarm trials.
pub fn noise_only(len: usize, seed: TrialSeed) -> SampleStream {
    let mut rng = seed.rng();
    SampleStream::new((0..len).map(|_| complex_gaussian(&mut rng, 1.0)).collect())
}
