use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown tag `{0}`")]
    UnknownTag(String),

    /// The embedded tag table is inconsistent. This is a build defect, not a
    /// user error.
    #[error("invalid embedded tagset: {0}")]
    Config(String),

    #[error("{source_name}:{line}: {message}")]
    Load {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("duplicate rule id `{0}`")]
    DuplicateRule(String),

    #[error("CoNLL-U line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no token at document `{doc}`, sentence {sentence}, token {token}")]
    Address {
        doc: String,
        sentence: usize,
        token: usize,
    },

    #[error("document `{0}` not found")]
    DocumentNotFound(String),

    #[error("storage error on {path}: {source}")]
    Storage {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("corrupt record in {path}: {message}")]
    CorruptRecord { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn load(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Load {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }

    #[cfg(feature = "corpus")]
    pub(crate) fn storage(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Storage {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable code, used by the HTTP error envelope.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownTag(_) => "UnknownTag",
            Error::Config(_) => "ConfigError",
            Error::Load { .. } => "LoadError",
            Error::DuplicateRule(_) => "DuplicateRule",
            Error::Parse { .. } => "ParseError",
            Error::Address { .. } => "AddressError",
            Error::DocumentNotFound(_) => "NotFound",
            Error::Storage { .. } => "StorageError",
            Error::CorruptRecord { .. } => "StorageError",
        }
    }
}
