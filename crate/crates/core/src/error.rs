use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid character {found:?} at position {position}")]
    Parse { position: usize, found: char },

    #[error("malformed input: {0}")]
    Format(String),

    #[error("{0}")]
    Domain(String),

    #[error("capacity exceeded at level {level}: {what}")]
    Capacity { level: u32, what: String },

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
