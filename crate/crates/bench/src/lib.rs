//! Benchmark harness: seeded PSO/ABC/BFO runs compared against the exact
//! lambda-iteration optimum, with averaged timing and convergence traces.

pub mod config;
pub mod error;
pub mod experiment;

pub use config::BenchConfig;
pub use error::BenchError;
pub use experiment::{
    comparison_csv, comparison_table, emit_trace, measure_time, run_experiment, write_outputs, AlgoSelector, Algorithm,
    ComparisonRow, ExperimentOutcome, ExperimentSpec, ProblemSelector, Timing,
};
