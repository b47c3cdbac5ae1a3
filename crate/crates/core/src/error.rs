use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::wiki::PageId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("malformed dump XML at byte {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("dump ended inside an open element at byte {offset}")]
    TruncatedDump { offset: u64 },

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("line {line}: duplicate token {token:?}")]
    DuplicateToken { line: usize, token: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vocabulary is empty")]
    EmptyVocabulary,

    #[error("index {index} out of range for vocabulary of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("not in vocabulary: {}", .0.join(", "))]
    NotInVocabulary(Vec<String>),

    #[error("query vector has zero norm")]
    ZeroQuery,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("vector set carries no frequency ranks")]
    MissingFrequencyRank,

    #[error("undefined statistic: {0}")]
    Undefined(&'static str),

    #[error("unknown page {0}")]
    UnknownPage(PageId),

    #[error("non-finite value in {0} after training")]
    NonFinite(&'static str),

    #[error("training aborted: {0}")]
    TrainingAborted(String),
}

impl Error {
    pub(crate) fn file(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }
}
