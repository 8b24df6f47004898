use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported PN degree {0}")]
    UnsupportedDegree(u32),

    #[error("preferred pair index {index} out of range ({available} pairs for degree {degree})")]
    PairOutOfRange {
        degree: u32,
        index: usize,
        available: usize,
    },

    #[error("block size must be at least 1")]
    ZeroBlockSize,

    #[error("invalid window parameter: {0}")]
    InvalidWindow(String),

    #[error("invalid framing: {0}")]
    InvalidFraming(String),

    #[error("grid shape mismatch: {0}")]
    GridShape(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("filter state does not belong to this plan: {0}")]
    StateMismatch(String),

    #[error("doppler grid needs at least two filter blocks, plan has {0}")]
    TooFewBlocks(usize),

    #[error("probability {0} outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),

    #[error("degenerate received block: {0}")]
    DegenerateInput(String),

    #[error("missing parameter: {0}")]
    MissingParameter(&'static str),

    #[error("series did not converge within {terms} terms (last term {last_term:e})")]
    NoConvergence { terms: usize, last_term: f64 },

    #[error("result {0} outside [0, 1]")]
    OutOfUnitInterval(f64),

    #[error("false-alarm rate does not bracket the target: {0}")]
    NonBracketing(String),

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}
