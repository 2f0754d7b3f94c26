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
    Csv(#[from] csv::Error),

    #[error("row {row}, column {column}: cannot parse {value:?} as a number")]
    UnparseableCell {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("row {row}, column {column}: missing value")]
    MissingValue { row: usize, column: usize },

    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("column {0} not found")]
    UnknownColumn(String),

    #[error("column selection by name requires a header row")]
    NameWithoutHeader,

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("dataset needs at least 2 instances, found {0}")]
    TooFewInstances(usize),

    #[error("dataset has a single class; at least 2 are required")]
    SingleClass,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("fold count {folds} is invalid for {instances} instances")]
    InvalidFoldCount { folds: usize, instances: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("every instance is isolated under the label filter; kNN distance pool is empty")]
    EmptyDistancePool,

    #[error("graphs to merge do not share the same node set")]
    MismatchedNodeSets,

    #[error("class {0} has no training node in the graph")]
    ClassAbsent(usize),

    #[error("test node inserted into class {0} received no edges")]
    IsolatedInsertion(usize),

    #[error("expected {expected} attributes, found {found}")]
    AttributeCountMismatch { expected: usize, found: usize },

    #[error("training graph is empty")]
    EmptyTrainingGraph,

    #[error("graph does not match dataset: {0}")]
    GraphDatasetMismatch(String),

    #[error("bundle error: {0}")]
    Bundle(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
