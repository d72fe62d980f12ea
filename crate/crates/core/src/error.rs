use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    InvalidInput { field: &'static str, reason: String },

    #[error("noise profile is all zero")]
    AllZeroProfile,

    #[error("effective physical error {effective:e} is at or above threshold {threshold:e}")]
    AboveThreshold { effective: f64, threshold: f64 },

    #[error("no code parameters on the search grid reach the requested logical error rate")]
    Infeasible,

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("degenerate abscissa: nearest points share x = {0}")]
    DegenerateAbscissa(f64),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("feature schema mismatch: expected {expected} features, got {got}")]
    SchemaMismatch { expected: usize, got: usize },

    #[error("undefined statistic: {0}")]
    Undefined(&'static str),

    #[error("unsupported model format version {found} (expected {expected})")]
    VersionMismatch { found: String, expected: u32 },

    #[error("corrupted model file: {0}")]
    Corrupt(String),

    #[error("malformed dataset at row {row}, column {column}: {reason}")]
    MalformedCsv {
        row: u64,
        column: String,
        reason: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
