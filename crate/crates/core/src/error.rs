use thiserror::Error;

/// Errors surfaced by every fallible operation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An index or numeric argument is outside its allowed range.
    #[error("argument error: {0}")]
    Argument(String),
    /// Input data violates a structural invariant.
    #[error("validation error: {0}")]
    Validation(String),
    /// A brute-force routine would exceed its size guard.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// Unknown identifier (named game, formulation code, ...).
    #[error("lookup error: {0}")]
    Lookup(String),
    /// Malformed text input.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// Solver output that cannot be turned into a profile.
    #[error("corrupt solution: {0}")]
    Corruption(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
