//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("unsupported sample-file version {found:?} (this build reads version {expected:?})")]
    Version { found: String, expected: String },

    #[error("marginal connectivity scores are defined for the 4-level coding only (got C = {0}); re-run with --categories 4 or skip --mcs")]
    McsRequiresFourCategories(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code for the CLI: 3 for data problems, 4 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Dimension(_)
            | Error::Invalid(_)
            | Error::Parse { .. }
            | Error::Version { .. }
            | Error::McsRequiresFourCategories(_)
            | Error::Csv(_) => 3,
            Error::Io(_) | Error::Json(_) => 4,
        }
    }
}
