use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing value at line {line}, column {column}")]
    MissingValue { line: usize, column: usize },

    #[error("non-numeric feature value {value:?} at line {line}, column {column}")]
    NonNumeric {
        line: usize,
        column: usize,
        value: String,
    },

    #[error("row at line {line} has {found} cells, expected {expected}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("label column {0} not found")]
    UnknownColumn(String),

    #[error("class {0:?} is not present in the dataset")]
    UnknownClass(String),

    #[error("dataset must contain at least two classes, found {0}")]
    TooFewClasses(usize),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("could not produce a holdout split with every class in both partitions after {attempts} attempts")]
    SplitFailed { attempts: usize },

    #[error("dimension mismatch: expected {expected} features, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("class counts must not all be zero")]
    EmptyCounts,

    #[error("inconsistent class counts: {0}")]
    InconsistentCounts(String),

    #[error("tree subset for voting is empty")]
    EmptyTreeSubset,

    #[error("unsupported model format version {found} (expected {expected})")]
    ModelVersion { found: u32, expected: u32 },

    #[error("corrupt model file: {0}")]
    CorruptModel(String),

    #[error("model does not match data: {0}")]
    ModelMismatch(String),

    #[error("missing results: {0}")]
    MissingResults(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{}: {error}", path.display())]
    File {
        path: PathBuf,
        error: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            error: source,
        }
    }

    /// True for errors caused by the caller's inputs (files, data, models)
    /// rather than by the library itself.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
