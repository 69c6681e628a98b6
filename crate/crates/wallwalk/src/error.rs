//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by constructors, samplers, and kernel evaluators.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// Structurally malformed input: wrong length, empty sample, bad shape.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A computation produced or encountered a non-finite value.
    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
