//! Closed-form acquisition probabilities and the special functions behind them.

mod probability;
mod special;

pub use probability::{
    alpha_n, diversity_combine, p_d, p_d_max, p_fa, p_fa_max, p_m_approx, p_m_exact, p_m_exact_awgn,
    p_m_exact_rayleigh, p_m_exact_rician, AwgnPmConvention, Method, ProbabilityReport, RicianOptions, RicianSeries,
    CONFIDENCE_SIGMAS,
};
pub use probability::p_M;
pub use special::{harmonic, incomplete_exp, marcum_q, Estimate, IncompleteExp, SpecialFunctionsCtx};
