use thiserror::Error;

/// Errors raised by the simulation core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration value for `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("power iteration did not converge after {iters} iterations")]
    NoConvergence { iters: usize },

    #[error("agent {agent}: regret term {term:e} is below the solver slack; benchmark is not optimal")]
    BrokenBenchmark { agent: usize, term: f64 },

    #[error("agent {agent}: active arm set became empty")]
    EmptyActiveSet { agent: usize },

    #[error("agent {agent}: arm {arm} has a zero counter after warm-up")]
    ZeroCounter { agent: usize, arm: usize },

    #[error("mixing identity violated: deviation {deviation:e} at round {round}")]
    MixingIdentity { round: u64, deviation: f64 },

    #[error("every trial failed for algorithm `{0}`")]
    AllTrialsFailed(String),

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
}

pub type Result<T> = std::result::Result<T, Error>;
