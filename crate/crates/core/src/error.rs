use std::path::PathBuf;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid edit {index} ({edit}): {reason}")]
    InvalidEdit {
        index: usize,
        edit: String,
        reason: String,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Scorer(#[from] crate::lm::ScorerError),

    #[error("kappa is undefined: {0}")]
    UndefinedKappa(String),

    #[error("correlation is undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("invalid version tree: {0}")]
    InvalidTree(String),

    #[error(transparent)]
    Annotation(#[from] crate::annotation::AnnotationError),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
