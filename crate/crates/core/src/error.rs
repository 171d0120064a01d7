use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{dataset} ({split}), line {line}: {message}")]
    MalformedLine {
        dataset: String,
        split: String,
        line: usize,
        message: String,
    },

    #[error("{dataset} ({split}), line {line}, value {position}: invalid value {token:?}")]
    InvalidValue {
        dataset: String,
        split: String,
        line: usize,
        position: usize,
        token: String,
    },

    #[error("{dataset}: training split is empty")]
    EmptyTrainSplit { dataset: String },

    #[error("{dataset}: class {class:?} has no training instances")]
    ClassWithoutTrainingInstances { dataset: String, class: String },

    #[error("results table, line {line}: {message}")]
    Results { line: usize, message: String },

    #[error("accuracy {value} out of range [0, 1] at line {line}")]
    AccuracyOutOfRange { line: usize, value: f64 },

    #[error("duplicate entry ({algorithm}, {dataset}{fold}) at line {line}")]
    DuplicateEntry {
        algorithm: String,
        dataset: String,
        fold: String,
        line: usize,
    },

    #[error("ragged fold counts for ({algorithm}, {dataset}): {message}")]
    RaggedFolds {
        algorithm: String,
        dataset: String,
        message: String,
    },

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{0}")]
    InvalidInput(String),

    #[error("column count mismatch: model expects {expected}, got {actual}")]
    ColumnMismatch { expected: usize, actual: usize },

    #[error("fingerprint schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
