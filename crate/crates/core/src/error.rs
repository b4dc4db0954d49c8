use std::path::PathBuf;

use crate::graph::NodeId;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("node {0} not found in graph")]
    NodeNotFound(NodeId),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("distributions do not share bin edges")]
    EdgeMismatch,

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("unknown measure '{0}'")]
    UnknownMeasure(String),

    #[error("unknown strategy '{0}'")]
    UnknownStrategy(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("replication failed (strategy {strategy}, seed {seed}): {message}")]
    Replication {
        strategy: String,
        seed: u64,
        message: String,
    },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
