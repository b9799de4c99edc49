//! Crate-wide error type and the exit-code policy used by the CLI.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An operation that needs at least one example was given none.
    #[error("dataset is empty")]
    EmptyDataset,

    /// Feature vectors (or query points) with inconsistent dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A value outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Valid input that exceeds a documented implementation limit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Malformed or out-of-range configuration.
    #[error("invalid config: {0}")]
    Config(String),

    /// Unparseable input data (CSV, JSON).
    #[error("parse error: {0}")]
    Parse(String),

    /// A mathematical invariant that should hold by construction failed.
    /// The CLI maps this to its own exit code so callers can tell a broken
    /// guarantee apart from ordinary bad input.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code for the CLI: 0 is success, 1 covers usage and input
    /// problems, 2 is reserved for mathematical invariant violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvariantViolation(_) => 2,
            _ => 1,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(format!("json: {e}"))
    }
}
