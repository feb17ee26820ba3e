//! Crate-wide error type.
//!
//! Field construction has its own fine-grained error ([`crate::field::FieldError`])
//! because it is exercised directly by user input; everything downstream shares
//! this enum.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] crate::field::FieldError),

    #[error("dimension mismatch: {context} (left {left}, right {right})")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("operands belong to different fields")]
    FieldMismatch,

    #[error("matrix is singular")]
    Singular,

    #[error("vector does not lie in the given span")]
    NotInSpan,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    Budget {
        what: &'static str,
        needed: u64,
        budget: u64,
    },

    #[error("integer overflow during exact arithmetic")]
    Overflow,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for a formatted precondition failure.
    pub fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Shorthand for a formatted invalid-input failure.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
