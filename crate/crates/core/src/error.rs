//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by dataset loading, model fitting, and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed input file. `line` is 1-based and includes the header.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Input violates the declared schema (unknown column, undeclared
    /// nominal value, numeric attribute where nominal is required, ...).
    #[error("schema error: {0}")]
    Schema(String),

    /// No usable rows survived loading.
    #[error("empty dataset: {0}")]
    EmptyDataset(String),

    /// An argument is outside its documented domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
