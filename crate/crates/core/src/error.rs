//! Error types shared across the crate.

use thiserror::Error;

/// Failure to parse one of the five entity category labels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown entity category `{0}`")]
pub struct ParseCategoryError(pub String);

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    /// Malformed input line in one of the text formats (annotation files,
    /// CoNLL-U, vector files, rule tables). Line numbers are 1-based.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A category label that is not one of PER/LOC/ORG/PRO/EVT.
    #[error("line {line}: {source}")]
    Category {
        line: usize,
        source: ParseCategoryError,
    },

    /// A value that cannot be written in the target format, e.g. a tab
    /// inside an annotation field.
    #[error("cannot serialize: {0}")]
    Serialize(String),

    #[error("word count mismatch: {left} vs {right}")]
    WordCountMismatch { left: usize, right: usize },

    #[error("vector dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("empty phrase")]
    EmptyPhrase,

    /// Invalid or inconsistent resource data outside of line-level parsing.
    #[error("invalid resource: {0}")]
    Resource(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
