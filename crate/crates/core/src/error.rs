use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("kernel column {column} is not a probability vector: {reason}")]
    NotStochastic { column: usize, reason: String },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("gradient of `{generator}` is undefined at coordinate {index} on the simplex boundary")]
    BoundaryGradient { generator: String, index: usize },

    #[error("generator `{0}` is not smooth")]
    NonSmooth(String),

    #[error("likelihood ratio is not constant on block {block:?}")]
    LikelihoodRatio { block: Vec<usize> },

    #[error("{count} candidate code length vectors exceed the enumeration limit of {limit}")]
    CandidateExplosion { count: u128, limit: u128 },

    #[error("solver stopped after {iterations} iterations with KKT residual {residual:e}")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("doubling rate is -inf for this portfolio")]
    InfiniteRate,

    #[error("invalid market: {0}")]
    InvalidMarket(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
