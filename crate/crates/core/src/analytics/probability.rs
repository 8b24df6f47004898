use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use super::special::{harmonic, incomplete_exp, Estimate, IncompleteExp, SpecialFunctionsCtx};
use crate::channels::ChannelKind;
use crate::{Error, Result};

/// Half-width, in standard deviations, of the 98% region used by the
/// approximate `P_m`.
pub const CONFIDENCE_SIGMAS: f64 = 2.33;

fn unit(p: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::OutOfUnitInterval(p))
    }
}

/// `exp(-gamma N)`.
pub fn p_fa(gamma: f64, n: usize) -> f64 {
    (-gamma * n as f64).exp()
}

/// `1 - (1 - P_FA)^N`.
pub fn p_fa_max(gamma: f64, n: usize) -> f64 {
    -(n as f64 * (-p_fa(gamma, n)).ln_1p()).exp_m1()
}

fn kappa_of(kappa: Option<f64>) -> Result<f64> {
    match kappa {
        Some(k) if k > 0.0 => Ok(k),
        Some(k) => Err(Error::InvalidArgument(format!("kappa must be positive, got {k}"))),
        None => Err(Error::MissingParameter("kappa")),
    }
}

/// Detection probability at the synchro position. `mu` is the SNR of the
/// preamble (mean SNR for Rayleigh, per path for the two-tap channel,
/// constant-part SNR for Rician).
pub fn p_d(kind: ChannelKind, mu: f64, gamma: f64, n: usize, kappa: Option<f64>) -> Result<f64> {
    let ctx = SpecialFunctionsCtx::default();
    let nf = n as f64;
    let p = match kind {
        ChannelKind::Awgn => ctx.marcum_q((2.0 * mu).sqrt(), (2.0 * gamma * (nf + mu)).sqrt()).checked()?,
        ChannelKind::RayleighFlat | ChannelKind::Rayleigh2Tap => (-gamma * nf / (mu + 1.0)).exp(),
        ChannelKind::Rician => {
            let d = mu / kappa_of(kappa)? + 1.0;
            ctx.marcum_q((2.0 * mu / d).sqrt(), (2.0 * gamma * (nf + mu) / d).sqrt()).checked()?
        }
    };
    unit(p)
}

/// Probability that the maximum falls on the synchro position, using the
/// 2.33-sigma bound for the largest non-synchro cell.
pub fn p_m_approx(kind: ChannelKind, mu: f64, kappa: Option<f64>) -> Result<f64> {
    let ctx = SpecialFunctionsCtx::default();
    let c2 = CONFIDENCE_SIGMAS * CONFIDENCE_SIGMAS;
    let p = match kind {
        ChannelKind::Awgn => ctx.marcum_q((2.0 * mu).sqrt(), (2.0 * c2).sqrt()).checked()?,
        ChannelKind::RayleighFlat | ChannelKind::Rayleigh2Tap => (-c2 / (mu + 1.0)).exp(),
        ChannelKind::Rician => {
            let d = mu / kappa_of(kappa)? + 1.0;
            ctx.marcum_q((2.0 * mu / d).sqrt(), (2.0 * c2 / d).sqrt()).checked()?
        }
    };
    unit(p)
}

/// Expected maximum of `N` unit-mean exponential variables, `H_N`.
pub fn alpha_n(n: usize) -> f64 {
    harmonic(n)
}

/// Second Marcum argument for the exact AWGN `P_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AwgnPmConvention {
    /// `sqrt(2 alpha)`, the same scaling as the threshold in `P_D`.
    #[default]
    Consistent,
    /// `sqrt(alpha)`.
    SqrtAlpha,
    /// `alpha` itself.
    Bare,
}

/// Which Rician series to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RicianSeries {
    /// Negative-binomial/Laguerre mixture, normalized so the weights sum to one.
    #[default]
    Corrected,
    /// Term-by-term transcription with the `2^(K-1)` prefactor and
    /// `F(n+1, 1, mu0 / (2 mu~ (K mu~ + 1)))`.
    AsPrinted,
}

pub fn p_m_exact_awgn(mu: f64, n: usize, convention: AwgnPmConvention) -> Result<f64> {
    let alpha = alpha_n(n.saturating_sub(1).max(1));
    let b = match convention {
        AwgnPmConvention::Consistent => (2.0 * alpha).sqrt(),
        AwgnPmConvention::SqrtAlpha => alpha.sqrt(),
        AwgnPmConvention::Bare => alpha,
    };
    unit(SpecialFunctionsCtx::default().marcum_q((2.0 * mu).sqrt(), b).checked()?)
}

/// `(K mu/(K mu + 1))^(1-K) exp(-K alpha_{N-1} / (K mu + 1))`.
pub fn p_m_exact_rayleigh(mu_bar: f64, n: usize, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    let alpha = alpha_n(n.saturating_sub(1).max(1));
    let kf = k as f64;
    let d = kf * mu_bar + 1.0;
    let pre = if k == 1 { 1.0 } else { (kf * mu_bar / d).powf(1.0 - kf) };
    unit(pre * (-kf * alpha / d).exp())
}

/// Options for the Rician series.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RicianOptions {
    pub series: RicianSeries,
    pub incomplete_exp: IncompleteExp,
}

/// Exact Rician `P_m` for constant-part SNR `mu0` and random-part mean
/// SNR `mu_tilde`, with `K` combined sequences.
///
/// The corrected series is `1 - sum_n pi_n P(Pois(K alpha) >= n + K)` with
/// `pi_n = exp(-lambda) rho^n / theta * L_n(-y)`, `theta = K mu~ + 1`,
/// `rho = K mu~ / theta`, `lambda = K mu0 / theta`, `y = mu0 / (mu~ theta)`.
/// The weights sum to one, which bounds the truncation error.
pub fn p_m_exact_rician(
    mu0: f64,
    mu_tilde: f64,
    n: usize,
    k: u32,
    opts: RicianOptions,
    ctx: &SpecialFunctionsCtx,
) -> Result<Estimate> {
    if k == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    if !(mu0 >= 0.0 && mu_tilde >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative SNR ({mu0}, {mu_tilde})")));
    }
    let alpha = alpha_n(n.saturating_sub(1).max(1));
    let est = match opts.series {
        RicianSeries::Corrected => rician_corrected(mu0, mu_tilde, alpha, k, opts.incomplete_exp, ctx),
        RicianSeries::AsPrinted => rician_as_printed(mu0, mu_tilde, alpha, k, opts.incomplete_exp, ctx)?,
    };
    unit(est.value)?;
    Ok(est)
}

/// `P(Pois(t) >= m)` through the chosen incomplete exponential.
fn poisson_upper(m: usize, t: f64, form: IncompleteExp) -> f64 {
    match form {
        IncompleteExp::Standard => {
            if m == 0 {
                1.0
            } else {
                gamma_lr(m as f64, t)
            }
        }
        IncompleteExp::PowerSum => 1.0 - (-t).exp() * incomplete_exp(m, t, form),
    }
}

fn rician_corrected(mu0: f64, mu_tilde: f64, alpha: f64, k: u32, form: IncompleteExp, ctx: &SpecialFunctionsCtx) -> Estimate {
    let kf = k as f64;
    let t = kf * alpha;
    let theta = kf * mu_tilde + 1.0;
    let lambda = kf * mu0 / theta;
    let mut mass = 0.0;
    let mut acc = 0.0;
    let mut terms = 0;

    // weight function for index n, evaluated incrementally
    let mut lag = super::special::LaguerreNeg::new(if mu_tilde > 0.0 { mu0 / (mu_tilde * theta) } else { 0.0 });
    let ln_rho = if mu_tilde > 0.0 { (kf * mu_tilde / theta).ln() } else { f64::NEG_INFINITY };
    for idx in 0..ctx.max_terms {
        let ln_pi = if mu_tilde > 0.0 {
            -lambda - theta.ln() + idx as f64 * ln_rho + lag.ln_value()
        } else {
            // no random part: Poisson(K mu0) weights
            -lambda + idx as f64 * lambda.ln() - ln_gamma(idx as f64 + 1.0)
        };
        let pi = if idx == 0 && mu_tilde == 0.0 { (-lambda).exp() } else { ln_pi.exp() };
        mass += pi;
        acc += pi * poisson_upper(idx + k as usize, t, form);
        terms += 1;
        let left = (1.0 - mass).max(0.0);
        if left <= 0.1 * ctx.tolerance * (1.0 - acc).max(f64::MIN_POSITIVE) || left <= 1e-16 {
            return Estimate { value: 1.0 - acc, converged: true, terms, error_bound: left };
        }
        if mu_tilde > 0.0 {
            lag.advance();
        }
    }
    Estimate { value: 1.0 - acc, converged: false, terms, error_bound: (1.0 - mass).max(0.0) }
}

fn rician_as_printed(
    mu0: f64,
    mu_tilde: f64,
    alpha: f64,
    k: u32,
    form: IncompleteExp,
    ctx: &SpecialFunctionsCtx,
) -> Result<Estimate> {
    if mu_tilde <= 0.0 {
        return Err(Error::InvalidArgument("printed series needs a random part (mu~ > 0)".into()));
    }
    let kf = k as f64;
    let t = kf * alpha;
    let theta = kf * mu_tilde + 1.0;
    let arg = mu0 / (2.0 * mu_tilde * theta);
    let ratio = kf * kf * mu_tilde / theta;
    let pre = 2f64.powi(k as i32 - 1) / theta;
    let mut acc = 0.0;
    let mut geo = 1.0;
    for idx in 0..ctx.max_terms {
        let f = ctx.hyp1f1(idx as f64 + 1.0, 1.0, arg)?.value;
        let tail = t.exp() - incomplete_exp(idx + k as usize, t, form);
        let term = pre * geo * f * tail;
        acc += term;
        if term.abs() <= 0.1 * ctx.tolerance * acc.abs().max(1e-300) || !term.is_finite() {
            return Ok(Estimate { value: 1.0 - acc, converged: term.is_finite(), terms: idx + 1, error_bound: term.abs() });
        }
        geo *= ratio;
    }
    Ok(Estimate { value: 1.0 - acc, converged: false, terms: ctx.max_terms, error_bound: f64::NAN })
}

/// Exact `P_m` with defaults: consistent AWGN scaling, printed Rayleigh
/// form, corrected Rician series with `mu0 = mu` and `mu~ = mu / kappa`.
pub fn p_m_exact(kind: ChannelKind, mu: f64, n: usize, k: u32, kappa: Option<f64>) -> Result<f64> {
    match kind {
        ChannelKind::Awgn => p_m_exact_awgn(mu, n, AwgnPmConvention::Consistent),
        ChannelKind::RayleighFlat | ChannelKind::Rayleigh2Tap => p_m_exact_rayleigh(mu, n, k),
        ChannelKind::Rician => {
            let kappa = kappa_of(kappa)?;
            p_m_exact_rician(mu, mu / kappa, n, k, RicianOptions::default(), &SpecialFunctionsCtx::default())?.checked()
        }
    }
}

/// `1 - (1 - P_FA)^(N-1) (1 - P_D)`.
pub fn p_d_max(p_fa: f64, p_d: f64, n: usize) -> Result<f64> {
    unit(p_fa)?;
    unit(p_d)?;
    let miss_all = ((n.max(1) - 1) as f64 * (-p_fa).ln_1p()).exp() * (1.0 - p_d);
    unit(1.0 - miss_all)
}

/// `P_M = P_m * P_D,M`.
#[allow(non_snake_case)]
pub fn p_M(p_m: f64, p_d_max: f64) -> Result<f64> {
    unit(p_m)?;
    unit(p_d_max)?;
    Ok(p_m * p_d_max)
}

/// `1 - prod_k (1 - p_k)`: probability that at least one path succeeds.
pub fn diversity_combine(per_path_probs: &[f64]) -> Result<f64> {
    let mut miss = 1.0;
    for &p in per_path_probs {
        miss *= 1.0 - unit(p)?;
    }
    Ok(1.0 - miss)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Approximate,
    Exact,
}

/// Analytic acquisition probabilities for one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityReport {
    pub p_fa: f64,
    pub p_fa_m: f64,
    pub p_d: f64,
    pub p_m: f64,
    pub p_d_m: f64,
    #[serde(rename = "p_M")]
    pub p_big_m: f64,
    pub channel: ChannelKind,
    pub method: Method,
}

impl ProbabilityReport {
    pub fn compute(kind: ChannelKind, mu: f64, gamma: f64, n: usize, kappa: Option<f64>, method: Method) -> Result<Self> {
        let pfa = p_fa(gamma, n);
        let pd = p_d(kind, mu, gamma, n, kappa)?;
        let pm = match method {
            Method::Approximate => p_m_approx(kind, mu, kappa)?,
            Method::Exact => p_m_exact(kind, mu, n, 1, kappa)?,
        };
        let pdm = p_d_max(pfa, pd, n)?;
        Ok(Self {
            p_fa: pfa,
            p_fa_m: p_fa_max(gamma, n),
            p_d: pd,
            p_m: pm,
            p_d_m: pdm,
            p_big_m: p_M(pm, pdm)?,
            channel: kind,
            method,
        })
    }
}
