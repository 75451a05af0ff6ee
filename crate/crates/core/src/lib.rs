//! Economic load dispatch solved three ways: particle swarm optimization,
//! artificial bee colony and bacterial foraging, checked against an exact
//! lambda-iteration baseline.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases at the crate root fix the scalar to `f64`; the `*F32` aliases
//! cover single precision.
//!
//! ```
//! use eld_core::{oracle, pso, BuiltinProblem, EldProblem, PsoConfig};
//!
//! let problem = EldProblem::builtin(BuiltinProblem::Problem1);
//! let exact = oracle::solve_default(&problem).unwrap();
//! let report = pso::run(&problem, &PsoConfig::default(), 42).unwrap();
//! assert!(report.best_cost - exact.cost < 1.0);
//! ```

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abc;
pub mod bfo;
pub mod error;
pub mod oracle;
pub mod problem;
pub mod pso;
pub mod rng;
pub mod scalar;
pub mod swarm;

pub use error::{EldError, Result};
pub use problem::BuiltinProblem;
pub use rng::{RngStream, Sampler};
pub use scalar::Scalar;
pub use swarm::{should_stop, ConstraintHandling};

pub type Generator = problem::Generator<f64>;
pub type EldProblem = problem::EldProblem<f64>;
pub type Dispatch = problem::Dispatch<f64>;
pub type Evaluation = problem::Evaluation<f64>;
pub type RepairSettings = problem::RepairSettings<f64>;
pub type OracleSolution = oracle::OracleSolution<f64>;
pub type StopCriteria = swarm::StopCriteria<f64>;
pub type ConvergenceTrace = swarm::ConvergenceTrace<f64>;
pub type RunReport = swarm::RunReport<f64>;
pub type PsoConfig = pso::PsoConfig<f64>;
pub type AbcConfig = abc::AbcConfig<f64>;
pub type BfoConfig = bfo::BfoConfig<f64>;

pub type EldProblemF32 = problem::EldProblem<f32>;
pub type DispatchF32 = problem::Dispatch<f32>;
pub type RunReportF32 = swarm::RunReport<f32>;
pub type PsoConfigF32 = pso::PsoConfig<f32>;
pub type AbcConfigF32 = abc::AbcConfig<f32>;
pub type BfoConfigF32 = bfo::BfoConfig<f32>;
