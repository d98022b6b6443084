use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("sentence {id}: {message}")]
    Invariant { id: String, message: String },

    #[error("bracketed tree: {0}")]
    Tree(String),

    #[error("dependency tree: {0}")]
    Graph(String),

    #[error("resource {0} is required by an enabled feature but was not loaded")]
    MissingResource(&'static str),

    #[error("{0}")]
    Resource(String),

    #[error("unknown feature name `{0}`")]
    UnknownFeature(String),

    #[error("training: {0}")]
    Training(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("prediction: {0}")]
    Prediction(String),

    #[error("model file: {0}")]
    Model(String),

    #[error("{0}")]
    Selection(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invariant(id: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invariant {
            id: id.into(),
            message: message.into(),
        }
    }

    /// Whether the failure is caused by bad input data rather than a bug or
    /// numerical breakdown.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::Numerical(_))
    }
}
