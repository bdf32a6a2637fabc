//! Error types shared across the crate.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("target column {name:?} not found in header")]
    MissingTargetColumn { name: String },

    #[error("column {name:?} appears more than once in header")]
    DuplicateColumn { name: String },

    #[error("row {row}, column {column:?}: {value:?} is not a finite number")]
    BadCell {
        /// 1-based data row (the header is not counted).
        row: usize,
        column: String,
        value: String,
    },

    #[error("need at least {need} rows, got {got}")]
    TooFewRows { need: usize, got: usize },

    #[error("target values are constant; standardization is undefined")]
    DegenerateTargets,

    #[error("length mismatch in {what}: {left} vs {right}")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("{what} must not be empty")]
    Empty { what: &'static str },

    #[error("invalid {what}: {why}")]
    InvalidParameter { what: &'static str, why: String },

    #[error("labels must be 0 or 1, found {0}")]
    NonBinaryLabel(f64),

    #[error("feature schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("feature index {index} out of range for {count} features")]
    BadFeatureIndex { index: usize, count: usize },

    #[error("unsupported model format version {found} (this build reads version {expected})")]
    ModelVersion { found: u64, expected: u64 },

    #[error("model file is not valid at byte {offset} (line {line}, column {column}): {message}")]
    ModelParse {
        offset: usize,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("black box: {0}")]
    BlackBox(#[from] BlackBoxError),

    #[error("non-finite value produced in {context}")]
    NonFinite { context: String },
}

impl Error {
    pub(crate) fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::InvalidParameter {
            what,
            why: why.into(),
        }
    }
}

/// Failures of an external model queried during local explanation.
#[derive(Debug, thiserror::Error)]
pub enum BlackBoxError {
    #[error("returned {got} predictions for {expected} rows")]
    LengthMismatch { expected: usize, got: usize },

    #[error("prediction for row {row} is not finite")]
    NonFinite { row: usize },

    #[error("output line {line}: {value:?} is not a number")]
    BadOutputLine { line: usize, value: String },

    #[error("command {command:?} failed ({status}); stderr: {stderr}")]
    CommandFailed {
        command: String,
        status: String,
        stderr: String,
    },

    #[error("could not run {command:?}: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Other(String),
}
