use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by problem construction, evaluation and the solvers.
#[derive(Debug, Error)]
pub enum EldError {
    #[error("dispatch has {found} outputs but the problem has {expected} units")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("infeasible problem: demand {demand} MW outside [{min_total}, {max_total}] MW")]
    Infeasible {
        demand: f64,
        min_total: f64,
        max_total: f64,
    },

    #[error("unknown built-in problem `{0}` (expected problem1, problem2-printed or problem2-corrected)")]
    UnknownProblem(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed problem definition: {0}")]
    Parse(String),
}

pub type Result<T, E = EldError> = std::result::Result<T, E>;
