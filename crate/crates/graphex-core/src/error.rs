//! Error type shared across the toolkit.

use thiserror::Error;

/// Errors produced by graph operations, model evaluation, sampling,
/// estimation and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The estimator is undefined on this input (e.g. log |E| <= 0).
    #[error("undefined estimate: {0}")]
    UndefinedEstimate(String),

    /// Malformed input data; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A numerical routine failed to converge; carries diagnostics.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Internal invariant broken (indicates a bug, not bad input).
    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code convention: 1 usage/domain, 2 data, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::UndefinedEstimate(_) => 1,
            Error::Parse { .. } | Error::Io(_) | Error::Json(_) => 2,
            Error::Numerical(_) | Error::Internal(_) => 3,
        }
    }
}
