use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::ExperimentSpec;
use crate::acquisition::{detect_per_lag, gamma_from_pfa, max_search, trailing_energies, DetectorConfig};
use crate::analytics::{diversity_combine, p_d, p_m_approx, p_m_exact};
use crate::block_filter::{filter, BlockFilterPlan};
use crate::channels::{apply_with_history, ChannelKind, TrialSeed};
use crate::signals::SampleStream;
use crate::{Complex64, Result};

/// Matched filter plus detector shared by all trials of an experiment.
#[derive(Debug, Clone)]
pub struct Receiver {
    pub plan: BlockFilterPlan,
    pub detector: DetectorConfig,
    pub n: usize,
    pub power_window: usize,
}

impl Receiver {
    pub fn new(spec: &ExperimentSpec) -> Result<Self> {
        spec.validate()?;
        let plan = spec.plan()?;
        let detector = spec.detector(&plan)?;
        Ok(Self { plan, detector, n: spec.n, power_window: spec.power_window_len() })
    }

    /// Matched-filter outputs and power estimates for the `N` candidate
    /// lags of a `2N` observation preceded by `history` samples.
    pub fn lag_statistics(&self, received: &[Complex64], history: usize) -> Result<(Vec<Complex64>, Vec<f64>)> {
        let n = self.n;
        let obs = SampleStream::new(received[history..history + 2 * n].to_vec());
        let y = filter(&self.plan, &obs)?;
        let first = self.plan.n() - 1;
        let mf = y.samples[first..first + n].to_vec();
        let energies = trailing_energies(received, history + n, n, n, self.power_window)?;
        Ok((mf, energies))
    }

    /// History length that fills the power window before the first lag.
    pub fn history_len(&self) -> usize {
        self.power_window.saturating_sub(self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Outcome {
    detected: bool,
    max_at_lag: bool,
    detected_any: bool,
    max_at_any: bool,
}

/// One SNR point of a simulated curve with its analytic counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub snr_db: f64,
    pub p_d_sim: f64,
    pub p_d_err: f64,
    pub p_m_sim: f64,
    pub p_m_err: f64,
    /// Either path detected (equals `p_d_sim` for single-path channels).
    pub p_d2_sim: f64,
    pub p_m2_sim: f64,
    pub p_d_theory: f64,
    /// Approximate (2.33-sigma) form.
    pub p_m_theory: f64,
    /// Exact form with `K = 1`.
    pub p_m_exact_theory: f64,
    /// Per-path theory combined over both paths.
    pub p_d2_theory: f64,
    pub trials: usize,
}

pub const CURVE_CSV_HEADER: &str =
    "snr_db,p_d_sim,p_d_err,p_m_sim,p_m_err,p_d2_sim,p_m2_sim,p_d_theory,p_m_theory,trials";

fn binomial_err(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

fn run_trial(rx: &Receiver, spec: &ExperimentSpec, s: &SampleStream, snr_db: f64, stream: u64) -> Result<Outcome> {
    let ch = spec.channel_spec(snr_db);
    let real = apply_with_history(&ch, s, TrialSeed::new(spec.base_seed, stream), rx.history_len())?;
    let (mf, energies) = rx.lag_statistics(&real.received.samples, real.history_len)?;
    let decisions = detect_per_lag(&mf, &energies, &rx.detector)?;
    let best = max_search(&decisions)?;
    let lags: Vec<usize> = if spec.channel == ChannelKind::Rayleigh2Tap {
        vec![real.lag, real.lag + spec.tap_separation]
    } else {
        vec![real.lag]
    };
    Ok(Outcome {
        detected: decisions[real.lag].detected,
        max_at_lag: best.lag == real.lag,
        detected_any: lags.iter().any(|&l| decisions[l].detected),
        max_at_any: lags.contains(&best.lag),
    })
}

/// Simulates every SNR point of `spec` and attaches analytic curves. Each
/// point gets its own trial streams, so points are statistically
/// independent. The result depends only on `spec`, not on the number of
/// worker threads.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<CurvePoint>> {
    let rx = Receiver::new(spec)?;
    let s = spec.preamble()?;
    let gamma = gamma_from_pfa(spec.target_pfa, spec.n)?;
    spec.snr_grid_db
        .iter()
        .enumerate()
        .map(|(point, &snr_db)| {
            let first = (point * spec.trials) as u64;
            let outcomes = (0..spec.trials)
                .into_par_iter()
                .map(|t| run_trial(&rx, spec, &s, snr_db, first + t as u64))
                .collect::<Result<Vec<_>>>()?;
            let t = spec.trials;
            let frac = |f: fn(&Outcome) -> bool| outcomes.iter().filter(|o| f(o)).count() as f64 / t as f64;
            let p_d_sim = frac(|o| o.detected);
            let p_m_sim = frac(|o| o.max_at_lag);
            let mu = 10f64.powf(snr_db / 10.0);
            let p_d_theory = p_d(spec.channel, mu, gamma, spec.n, spec.kappa)?;
            let paths = if spec.channel == ChannelKind::Rayleigh2Tap { 2 } else { 1 };
            Ok(CurvePoint {
                snr_db,
                p_d_sim,
                p_d_err: binomial_err(p_d_sim, t),
                p_m_sim,
                p_m_err: binomial_err(p_m_sim, t),
                p_d2_sim: frac(|o| o.detected_any),
                p_m2_sim: frac(|o| o.max_at_any),
                p_d_theory,
                p_m_theory: p_m_approx(spec.channel, mu, spec.kappa)?,
                p_m_exact_theory: p_m_exact(spec.channel, mu, spec.n, 1, spec.kappa)?,
                p_d2_theory: diversity_combine(&vec![p_d_theory; paths])?,
                trials: t,
            })
        })
        .collect()
}

/// CSV with [`CURVE_CSV_HEADER`]; floats use the shortest round-trip form.
pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from(CURVE_CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            p.snr_db, p.p_d_sim, p.p_d_err, p.p_m_sim, p.p_m_err, p.p_d2_sim, p.p_m2_sim, p.p_d_theory, p.p_m_theory, p.trials
        ));
    }
    out
}
