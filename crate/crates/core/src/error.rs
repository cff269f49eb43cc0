use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("graph has no edges after removing self-loops")]
    NoEdges,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not enough non-edges: requested {requested}, available {available}")]
    InsufficientNonEdges { requested: usize, available: usize },

    #[error("node {node} has no neighbours")]
    DeadEnd { node: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("node {node} out of range for {len} rows")]
    MissingNode { node: usize, len: usize },

    #[error("vocabulary covers {vocab} nodes but graph has {graph}")]
    VocabMismatch { vocab: usize, graph: usize },

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("both classes must be present (positives {positives}, negatives {negatives})")]
    SingleClass { positives: usize, negatives: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("correlation undefined for constant input")]
    UndefinedCorrelation,

    #[error("{stage} artifact: {message}")]
    Format { stage: &'static str, message: String },

    #[error("dataset {name}: transport failure: {message}")]
    Transport { name: String, message: String },

    #[error("dataset {name}: checksum mismatch (expected {expected}, got {actual}); quarantined at {quarantine}")]
    ChecksumMismatch {
        name: String,
        expected: String,
        actual: String,
        quarantine: PathBuf,
    },

    #[error("configuration: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Transport failures are the only errors worth retrying.
    pub fn is_retryable(&self) -> bool {
        matches!(self, Error::Transport { .. })
    }
}
