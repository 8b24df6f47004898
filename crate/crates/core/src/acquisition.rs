//! CFAR matched-filter detection: thresholds, serial search and maximum search.

use crate::{Complex64, Error, Result};

/// `gamma = -ln(target_pfa) / N`, the inverse of `P_FA = exp(-gamma N)`.
pub fn gamma_from_pfa(target_pfa: f64, n: usize) -> Result<f64> {
    if !(target_pfa > 0.0 && target_pfa < 1.0) {
        return Err(Error::ProbabilityOutOfRange(target_pfa));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("preamble length must be at least 1".into()));
    }
    Ok(-target_pfa.ln() / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// Effective threshold parameter, multiplier included.
    pub gamma: f64,
    pub n: usize,
    /// Window/overlap power normalization applied to `||s||`.
    pub norm_factor: f64,
    pub target_pfa: f64,
    pub threshold_multiplier: f64,
}

impl DetectorConfig {
    pub fn new(target_pfa: f64, n: usize) -> Result<Self> {
        Ok(Self {
            gamma: gamma_from_pfa(target_pfa, n)?,
            n,
            norm_factor: 1.0,
            target_pfa,
            threshold_multiplier: 1.0,
        })
    }

    pub fn with_norm_factor(mut self, norm_factor: f64) -> Self {
        self.norm_factor = norm_factor;
        self
    }

    pub fn with_multiplier(mut self, multiplier: f64) -> Self {
        self.gamma = self.gamma / self.threshold_multiplier * multiplier;
        self.threshold_multiplier = multiplier;
        self
    }

    /// `gamma * (norm_factor * ||s||)^2 * y_energy` with `||s|| = 1`.
    pub fn threshold(&self, y_energy: f64) -> f64 {
        self.gamma * self.norm_factor * self.norm_factor * y_energy
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub lag: usize,
    pub statistic: f64,
    pub threshold_value: f64,
    pub detected: bool,
    pub is_max: bool,
    /// Set when the received energy was zero.
    pub degenerate: bool,
}

fn decide(lag: usize, r: Complex64, y_energy: f64, cfg: &DetectorConfig) -> Result<Decision> {
    if !(y_energy >= 0.0) {
        return Err(Error::DegenerateInput(format!("received energy {y_energy} at lag {lag}")));
    }
    let statistic = r.norm_sqr();
    let threshold_value = cfg.threshold(y_energy);
    let degenerate = y_energy == 0.0;
    Ok(Decision {
        lag,
        statistic,
        threshold_value,
        detected: !degenerate && statistic > threshold_value,
        is_max: false,
        degenerate,
    })
}

/// Serial search: every lag is tested against the same received energy.
pub fn detect(mf_outputs: &[Complex64], y_energy: f64, cfg: &DetectorConfig) -> Result<Vec<Decision>> {
    mf_outputs
        .iter()
        .enumerate()
        .map(|(lag, &r)| decide(lag, r, y_energy, cfg))
        .collect()
}

/// Serial search with a separate energy estimate per lag.
pub fn detect_per_lag(mf_outputs: &[Complex64], y_energy: &[f64], cfg: &DetectorConfig) -> Result<Vec<Decision>> {
    if mf_outputs.len() != y_energy.len() {
        return Err(Error::InvalidArgument(format!(
            "{} filter outputs but {} energy values",
            mf_outputs.len(),
            y_energy.len()
        )));
    }
    mf_outputs
        .iter()
        .zip(y_energy)
        .enumerate()
        .map(|(lag, (&r, &e))| decide(lag, r, e, cfg))
        .collect()
}

/// Largest statistic, smallest lag on ties, with `is_max` set.
pub fn max_search(decisions: &[Decision]) -> Result<Decision> {
    let mut best = *decisions.first().ok_or(Error::EmptyInput("decisions"))?;
    for d in &decisions[1..] {
        if d.statistic > best.statistic {
            best = *d;
        }
    }
    best.is_max = true;
    Ok(best)
}

/// Energy estimates `N * mean(|y|^2)` over the `window` samples ending just
/// before `first_end + k`, for `k in 0..count`. Windows are clipped at the
/// start of `y`.
pub fn trailing_energies(y: &[Complex64], first_end: usize, count: usize, n: usize, window: usize) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::InvalidArgument("power window must be at least 1 sample".into()));
    }
    if first_end + count > y.len() + 1 || first_end == 0 {
        return Err(Error::InvalidArgument(format!(
            "energy windows ending at {first_end}..{} do not fit {} samples",
            first_end + count,
            y.len()
        )));
    }
    let mut prefix = Vec::with_capacity(y.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in y {
        acc += v.norm_sqr();
        prefix.push(acc);
    }
    Ok((0..count)
        .map(|k| {
            let end = first_end + k;
            let start = end.saturating_sub(window);
            let sum = (prefix[end] - prefix[start]).max(0.0);
            n as f64 * sum / (end - start) as f64
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn gamma_values() {
        assert!((gamma_from_pfa(0.01, 64).unwrap() - 0.071_955_784_156_063_92).abs() < 1e-12);
        assert!((gamma_from_pfa((-1.0f64).exp(), 1).unwrap() - 1.0).abs() < 1e-15);
        let g = gamma_from_pfa(0.003, 37).unwrap();
        assert!(((-g * 37.0).exp() - 0.003).abs() < 1e-12);
        assert!(gamma_from_pfa(0.0, 64).is_err());
        assert!(gamma_from_pfa(1.0, 64).is_err());
    }

    #[test]
    fn noise_free_peak_detected() {
        let cfg = DetectorConfig::new(0.01, 64).unwrap();
        let d = detect(&[c(1.0)], 1.0, &cfg).unwrap();
        assert!(d[0].detected);
        assert!((d[0].threshold_value - 0.071_955_784_156_063_92).abs() < 1e-12);
    }

    #[test]
    fn zero_energy_is_degenerate() {
        let cfg = DetectorConfig::new(0.01, 64).unwrap();
        let d = detect(&[c(0.0), c(0.0)], 0.0, &cfg).unwrap();
        assert!(d.iter().all(|x| !x.detected && x.degenerate));
        assert!(detect(&[c(1.0)], -1.0, &cfg).is_err());
    }

    #[test]
    fn argmax_and_ties() {
        let cfg = DetectorConfig::new(0.01, 64).unwrap();
        let d = detect(&[c(0.1f64.sqrt()), c(0.9f64.sqrt()), c(0.3f64.sqrt())], 1.0, &cfg).unwrap();
        let m = max_search(&d).unwrap();
        assert_eq!(m.lag, 1);
        assert!(m.is_max);
        let d = detect(&[c(0.5), c(0.5)], 1.0, &cfg).unwrap();
        assert_eq!(max_search(&d).unwrap().lag, 0);
        assert!(max_search(&[]).is_err());
    }

    #[test]
    fn multiplier_scales_gamma() {
        let base = DetectorConfig::new(0.01, 64).unwrap();
        let m = base.with_multiplier(2.0).with_multiplier(3.0);
        assert!((m.gamma - 3.0 * base.gamma).abs() < 1e-15);
    }

    #[test]
    fn trailing_energy_windows() {
        let y: Vec<Complex64> = (1..=6).map(|v| c(v as f64)).collect();
        let e = trailing_energies(&y, 3, 4, 2, 2).unwrap();
        // windows [1,3), [2,4), [3,5), [4,6)
        let want = [2.0 * (4.0 + 9.0) / 2.0, 2.0 * (9.0 + 16.0) / 2.0, 2.0 * (16.0 + 25.0) / 2.0, 2.0 * (25.0 + 36.0) / 2.0];
        for (a, b) in e.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        let clipped = trailing_energies(&y, 1, 1, 1, 5).unwrap();
        assert!((clipped[0] - 1.0).abs() < 1e-12);
        assert!(trailing_energies(&y, 5, 4, 1, 2).is_err());
    }
}
