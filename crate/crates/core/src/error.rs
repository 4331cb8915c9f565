use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("missing file {0}")]
    MissingFile(PathBuf),

    #[error("empty class: {0}")]
    EmptyClass(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("motif has {0} nodes, at most 8 are supported")]
    MotifTooLarge(usize),

    #[error("enumeration guard exceeded: {terms} terms > {limit}")]
    GuardExceeded { terms: f64, limit: f64 },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than an internal failure.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }
}
