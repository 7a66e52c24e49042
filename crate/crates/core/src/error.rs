//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of a kernel function.
    #[error("domain error in {func}: {msg}")]
    Domain { func: &'static str, msg: String },

    /// Structurally invalid argument (bad count, unordered interval, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A quadrature rule could not be constructed to tolerance.
    #[error("rule construction failed: {0}")]
    RuleConstruction(String),

    /// An operation was called on the wrong solver branch.
    #[error("branch error: {0}")]
    Branch(String),

    /// Vector lengths disagree with the problem dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            func,
            msg: msg.into(),
        }
    }
}
