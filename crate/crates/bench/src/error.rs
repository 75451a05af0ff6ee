use std::path::PathBuf;

use eld_core::EldError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Problem(#[from] EldError),

    #[error("cannot read config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl BenchError {
    /// 1 usage, 2 input or infeasibility, 3 output.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Usage(_) => 1,
            BenchError::Problem(_) | BenchError::Config { .. } => 2,
            BenchError::Output { .. } => 3,
        }
    }
}
