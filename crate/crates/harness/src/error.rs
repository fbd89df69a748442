use std::path::PathBuf;

use pdist_core::{DistanceError, GraphError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    GraphAt {
        line: usize,
        #[source]
        source: GraphError,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error("{0}")]
    Input(String),
}

impl HarnessError {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        HarnessError::Parse { line, message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    /// Line number of a parse or per-line graph error.
    pub fn line(&self) -> Option<usize> {
        match self {
            HarnessError::Parse { line, .. } | HarnessError::GraphAt { line, .. } => Some(*line),
            _ => None,
        }
    }
}
