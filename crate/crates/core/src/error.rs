use std::path::PathBuf;

use thiserror::Error;

use crate::oversample::SyntheticBatch;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}, column '{column}': cannot parse {value:?} as a number")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("more than two classes: {0:?}")]
    TooManyClasses(Vec<String>),

    #[error("dataset contains a single class")]
    SingleClass,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("empty split part: {0}")]
    EmptySplitPart(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("intra-class dissimilarity undefined for sample {0}: its class is a singleton")]
    SingletonClass(usize),

    #[error("degenerate weighting: every silhouette coefficient equals {0}")]
    DegenerateWeighting(f64),

    #[error(
        "attempt budget exhausted: accepted {} of {} after {} attempts",
        batch.accepted, requested, batch.attempts
    )]
    BudgetExhausted {
        requested: usize,
        batch: Box<SyntheticBatch>,
    },

    #[error("training diverged: non-finite loss at epoch {epoch}")]
    Divergence { epoch: usize },

    #[error("iteration {index}: {source}")]
    Iteration {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("fold {fold} does not contain both classes")]
    SingleClassFold { fold: usize },

    #[error("configuration: {0}")]
    Config(String),

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used for process exit codes and FFI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Budget,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) => ErrorKind::Usage,
            Error::BudgetExhausted { .. } => ErrorKind::Budget,
            Error::Iteration { source, .. } => source.kind(),
            _ => ErrorKind::Data,
        }
    }
}
