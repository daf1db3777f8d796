use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FalError {
    #[error("pole at {0}")]
    Pole(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("moment diverges: {0}")]
    MomentDiverges(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
}

pub type Result<T> = std::result::Result<T, FalError>;

