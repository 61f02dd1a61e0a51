use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A state or contraction would exceed the configured memory cap.
    #[error("resource limit: {what} needs {required}, cap is {cap}")]
    ResourceLimit {
        what: String,
        required: usize,
        cap: usize,
    },

    #[error("plan failure at node {node}: {reason}")]
    PlanFailure { node: usize, reason: String },

    #[error("logical gate arity {arity} exceeds the configured maximum {max}")]
    ArityOverflow { arity: usize, max: usize },

    #[error("sampling budget exceeded: {accepted} of {requested} samples after {proposals} proposals")]
    BudgetExceeded {
        requested: usize,
        accepted: usize,
        proposals: u64,
    },

    #[error("outcome {outcome} has zero probability; log(1/p) is undefined")]
    UndefinedLogarithm { outcome: u64 },

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
