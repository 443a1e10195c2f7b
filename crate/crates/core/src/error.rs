use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(String),

    #[error("header does not match schema; offending columns: {}", offending.join(", "))]
    HeaderMismatch { offending: Vec<String> },

    #[error("cannot parse row {row}, column {column}: token {token:?}")]
    ParseCell {
        row: usize,
        column: String,
        token: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("leakage: {0}")]
    Leakage(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn fit(msg: impl Into<String>) -> Self {
        Error::Fit(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 2 config, 3 data, 4 numeric/fit.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Leakage(_) | Error::Json(_) => 2,
            Error::Io { .. }
            | Error::Csv(_)
            | Error::HeaderMismatch { .. }
            | Error::ParseCell { .. }
            | Error::Schema(_)
            | Error::InvalidInput(_) => 3,
            Error::Fit(_) | Error::Numeric(_) => 4,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
