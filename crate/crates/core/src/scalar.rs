//! Floating-point scalar abstraction shared by every module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::distributions::uniform::SampleUniform;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar used for powers (MW), costs ($/h) and incremental costs ($/MWh).
///
/// Implemented for `f32` and `f64`. Tolerances depend on the precision: a
/// 1e-6 MW balance residual is meaningful in double precision but sits below
/// the spacing of `f32` values near 1000 MW.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + SampleUniform
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Default limit on |Σ P − demand| accepted by the repair operator, MW.
    fn repair_tolerance() -> Self;

    /// Default balance tolerance of the lambda-iteration oracle, MW.
    fn oracle_tolerance() -> Self;

    /// Converts an `f64` literal. Exact for `f64`, nearest value for `f32`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn repair_tolerance() -> Self {
        1e-6
    }

    fn oracle_tolerance() -> Self {
        1e-7
    }
}

impl Scalar for f32 {
    fn repair_tolerance() -> Self {
        1e-3
    }

    fn oracle_tolerance() -> Self {
        1e-3
    }
}
