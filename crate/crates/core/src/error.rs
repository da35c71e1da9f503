use thiserror::Error;

/// Errors raised by the library. Each maps to one CLI exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("capacity exceeded: dimension {dim} > limit {limit}")]
    Capacity { dim: String, limit: usize },
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("degenerate roots: {0}")]
    DegenerateRoot(String),
    #[error("structural mismatch: {0}")]
    Structural(String),
    #[error("no convergence after {iterations} iterations: {what}")]
    NoConvergence { what: String, iterations: usize },
    #[error("none exists: {0}")]
    NoneExists(String),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
