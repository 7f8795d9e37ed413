use thiserror::Error;

/// Errors raised by the models, solvers and simulator in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CacError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("arity mismatch: expected {expected} values, got {actual}")]
    ArityMismatch { expected: usize, actual: usize },

    #[error("training diverged at epoch {epoch}: loss is {loss}")]
    TrainingDiverged { epoch: usize, loss: f64 },

    #[error("policy violation: {0}")]
    PolicyViolation(String),

    #[error("unsupported policy: {0}")]
    UnsupportedPolicy(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, CacError>;

pub(crate) fn invalid(msg: impl Into<String>) -> CacError {
    CacError::InvalidParameter(msg.into())
}
