//! Error type shared across the crate.

use std::io;
use std::path::PathBuf;

/// All failure modes surfaced by the library.
///
/// `Io` wraps filesystem/stream errors; every other variant is a validation
/// failure in the input data or in how operations were combined.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: expected 2 whitespace-separated tokens, found {found}")]
    MalformedEdgeLine { line: usize, found: usize },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("community input contains no communities")]
    EmptyCommunities,

    #[error("line {line}: node '{token}' does not appear in the graph")]
    UnknownNode { token: String, line: usize },

    #[error("node index {index} is out of range for this graph")]
    NodeLookup { index: usize },

    #[error("{metric} requires a partition, but '{label}' is a cover")]
    PartitionRequired { metric: &'static str, label: String },

    #[error("ranking requires at least 2 algorithms, got {got}")]
    InsufficientAlgorithms { got: usize },

    #[error("ranking requires at least 1 dataset")]
    NoDatasets,

    #[error("csv row {row}, column {col}: expected a number, found '{value}'")]
    CsvCell { row: usize, col: usize, value: String },

    #[error("csv row {row}: expected {expected} columns, found {found}")]
    CsvShape { row: usize, expected: usize, found: usize },

    #[error("csv: {detail}")]
    Csv { detail: String },

    #[error("algorithm '{algorithm}' has no community file for dataset '{dataset}'")]
    MissingPartition { algorithm: String, dataset: String },

    #[error("duplicate {kind} label '{label}'")]
    DuplicateLabel { kind: &'static str, label: String },

    #[error("path does not exist: {path}")]
    PathMissing { path: PathBuf },

    #[error("manifest: {detail}")]
    Manifest { detail: String },

    #[error("dataset '{dataset}'{}: {source}", .algorithm.as_deref().map(|a| format!(", algorithm '{a}'")).unwrap_or_default())]
    Context {
        dataset: String,
        algorithm: Option<String>,
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: io::Error,
    },

    #[error("{0}")]
    Io(#[from] io::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to: 2 for I/O, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::File { .. } => 2,
            Error::Context { source, .. } => source.exit_code(),
            _ => 1,
        }
    }

    /// Wraps `self` with the dataset/algorithm it occurred under.
    pub fn in_context(self, dataset: &str, algorithm: Option<&str>) -> Error {
        Error::Context {
            dataset: dataset.to_owned(),
            algorithm: algorithm.map(str::to_owned),
            source: Box::new(self),
        }
    }

    /// Attaches the file path an [`io::Error`] occurred on; other errors are
    /// passed through untouched.
    pub fn with_path(self, path: &std::path::Path) -> Error {
        match self {
            Error::Io(source) => Error::File {
                path: path.display().to_string(),
                source,
            },
            other => other,
        }
    }
}
