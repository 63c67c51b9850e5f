use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),
    #[error("invalid numeric context: {0}")]
    InvalidContext(String),
    #[error("no certified convergence within {0} terms")]
    NonConvergence(usize),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
