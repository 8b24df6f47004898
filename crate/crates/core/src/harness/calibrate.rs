use rayon::prelude::*;

use super::run::Receiver;
use super::spec::ExperimentSpec;
use crate::channels::{noise_only, TrialSeed};
use crate::{Error, Result};

/// Noise-only trials draw from seeds disjoint from the signal trials.
const NOISE_SEED_SALT: u64 = 0x005e_ed0f_f415_ea1a;

/// Counted false alarms over all lags of the noise-only trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaMeasurement {
    pub false_alarms: u64,
    pub tests: u64,
}

impl FaMeasurement {
    pub fn rate(&self) -> f64 {
        self.false_alarms as f64 / self.tests as f64
    }

    /// Binomial standard error around `p`.
    pub fn sigma(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.tests as f64).sqrt()
    }
}

/// `statistic / threshold` at multiplier 1 for every lag of noise-only
/// trial `t`; a lag alarms at multiplier `c` when its ratio exceeds `c`.
fn trial_ratios(rx: &Receiver, seed: u64, t: usize) -> Result<Vec<f64>> {
    let hist = rx.history_len();
    let y = noise_only(hist + 2 * rx.n, TrialSeed::new(seed, t as u64));
    let (mf, energies) = rx.lag_statistics(&y.samples, hist)?;
    Ok(mf.iter().zip(&energies).map(|(r, &e)| r.norm_sqr() / rx.detector.threshold(e)).collect())
}

fn unit_receiver(spec: &ExperimentSpec) -> Result<Receiver> {
    let mut base = spec.clone();
    base.threshold_multiplier = 1.0;
    Receiver::new(&base)
}

fn noise_ratios(spec: &ExperimentSpec, noise_trials: usize) -> Result<Vec<f64>> {
    let rx = unit_receiver(spec)?;
    let seed = spec.base_seed ^ NOISE_SEED_SALT;
    let per_trial = (0..noise_trials)
        .into_par_iter()
        .map(|t| trial_ratios(&rx, seed, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

/// False alarms at the spec's threshold multiplier.
pub fn measure_fa_counts(spec: &ExperimentSpec, noise_trials: usize) -> Result<FaMeasurement> {
    if noise_trials == 0 {
        return Err(Error::InvalidExperiment("noise_trials must be at least 1".into()));
    }
    let rx = unit_receiver(spec)?;
    let seed = spec.base_seed ^ NOISE_SEED_SALT;
    let c = spec.threshold_multiplier;
    let false_alarms = (0..noise_trials)
        .into_par_iter()
        .map(|t| Ok(trial_ratios(&rx, seed, t)?.iter().filter(|&&q| q > c).count() as u64))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(FaMeasurement { false_alarms, tests: (noise_trials * spec.n) as u64 })
}

/// Empirical false-alarm rate over all lags of `noise_trials` noise-only trials.
pub fn measure_fa(spec: &ExperimentSpec, noise_trials: usize) -> Result<f64> {
    Ok(measure_fa_counts(spec, noise_trials)?.rate())
}

/// Bisects the threshold multiplier (in log scale) until the noise-only
/// false-alarm rate is within 10% of `target_pfa`.
pub fn calibrate_threshold(spec: &ExperimentSpec, noise_trials: usize) -> Result<f64> {
    if noise_trials < 10_000 {
        return Err(Error::InvalidExperiment(format!("calibration needs at least 10000 noise trials, got {noise_trials}")));
    }
    let mut ratios = noise_ratios(spec, noise_trials)?;
    ratios.sort_by(f64::total_cmp);
    let total = ratios.len() as f64;
    let target = spec.target_pfa;
    let fa = |c: f64| (ratios.len() - ratios.partition_point(|&q| q <= c)) as f64 / total;

    let (mut lo, mut hi) = (1e-6f64, 1e6f64);
    if fa(lo) < target || fa(hi) > target {
        return Err(Error::NonBracketing(format!(
            "rate {} at multiplier {lo}, {} at {hi}",
            fa(lo),
            fa(hi)
        )));
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let rate = fa(mid);
        if (rate - target).abs() <= 0.1 * target {
            return Ok(mid);
        }
        if rate > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonBracketing(format!("no multiplier gives a rate within 10% of {target}")))
}
