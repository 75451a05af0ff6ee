//! Economic load dispatch problem: quadratic unit costs, output limits and
//! the supply-demand balance, plus the repair operator shared by the
//! optimizers.

use std::fmt;
use std::ops::Index;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{EldError, Result};
use crate::rng::Sampler;
use crate::scalar::Scalar;

/// One generating unit: output limits in MW and fuel-cost coefficients of
/// `a·P² + b·P + c` ($/h).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Generator<T> {
    pub p_min: T,
    pub p_max: T,
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Scalar> Generator<T> {
    pub fn new(p_min: T, p_max: T, a: T, b: T, c: T) -> Result<Self> {
        let g = Self { p_min, p_max, a, b, c };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let all = [self.p_min, self.p_max, self.a, self.b, self.c];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(EldError::InvalidInput("generator fields must be finite".into()));
        }
        if !(self.p_min < self.p_max) {
            return Err(EldError::InvalidInput(format!(
                "p_min {} must be below p_max {}",
                self.p_min, self.p_max
            )));
        }
        if self.a < T::zero() {
            return Err(EldError::InvalidInput(format!(
                "quadratic coefficient {} is negative",
                self.a
            )));
        }
        Ok(())
    }

    /// Fuel cost at output `p`, $/h.
    #[inline]
    pub fn cost(&self, p: T) -> T {
        (self.a * p + self.b) * p + self.c
    }

    /// Incremental cost dC/dP at output `p`, $/MWh.
    #[inline]
    pub fn incremental_cost(&self, p: T) -> T {
        (self.a + self.a) * p + self.b
    }

    #[inline]
    pub fn range(&self) -> T {
        self.p_max - self.p_min
    }

    #[inline]
    pub fn clamp(&self, p: T) -> T {
        p.max(self.p_min).min(self.p_max)
    }

    /// Distance of `p` outside `[p_min, p_max]`, zero when inside.
    #[inline]
    pub fn violation(&self, p: T) -> T {
        if p < self.p_min {
            self.p_min - p
        } else if p > self.p_max {
            p - self.p_max
        } else {
            T::zero()
        }
    }
}

/// Candidate output vector, one entry per unit in MW. All entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Dispatch<T>(Vec<T>);

impl<T: Scalar> Dispatch<T> {
    pub fn new(outputs: Vec<T>) -> Result<Self> {
        if let Some(i) = outputs.iter().position(|p| !p.is_finite()) {
            return Err(EldError::InvalidInput(format!("output {i} is not finite")));
        }
        Ok(Self(outputs))
    }

    pub(crate) fn from_vec_unchecked(outputs: Vec<T>) -> Self {
        debug_assert!(outputs.iter().all(|p| p.is_finite()));
        Self(outputs)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn total(&self) -> T {
        self.0.iter().copied().sum()
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

impl<T> Index<usize> for Dispatch<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T: Scalar> TryFrom<Vec<T>> for Dispatch<T> {
    type Error = EldError;

    fn try_from(v: Vec<T>) -> Result<Self> {
        Self::new(v)
    }
}

/// Cost of a dispatch together with its constraint diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation<T> {
    /// Σ (a·P² + b·P + c), regardless of feasibility.
    pub cost: T,
    /// Σ P − demand, MW.
    pub balance_residual: T,
    /// Total magnitude by which outputs leave their limits, MW.
    pub limit_violation: T,
}

impl<T: Scalar> Evaluation<T> {
    pub fn is_feasible(&self, tol: T) -> bool {
        self.balance_residual.abs() <= tol && self.limit_violation <= tol
    }
}

/// Tolerance and pass budget of the repair operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepairSettings<T> {
    pub tolerance: T,
    pub max_passes: usize,
}

impl<T: Scalar> Default for RepairSettings<T> {
    fn default() -> Self {
        Self {
            tolerance: T::repair_tolerance(),
            max_passes: 100,
        }
    }
}

/// Result of [`EldProblem::repair_with`]. `residual` is the balance left
/// over; it exceeds the tolerance only when the pass budget ran out.
#[derive(Debug, Clone, PartialEq)]
pub struct Repaired<T> {
    pub dispatch: Dispatch<T>,
    pub residual: T,
    pub passes: usize,
    pub converged: bool,
}

/// Units plus total demand. Construction guarantees
/// `Σ p_min ≤ demand ≤ Σ p_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct EldProblem<T> {
    generators: Vec<Generator<T>>,
    demand: T,
}

impl<T: Scalar> EldProblem<T> {
    pub fn new(generators: Vec<Generator<T>>, demand: T) -> Result<Self> {
        if generators.is_empty() {
            return Err(EldError::InvalidInput("problem has no units".into()));
        }
        for (i, g) in generators.iter().enumerate() {
            g.validate()
                .map_err(|e| EldError::InvalidInput(format!("unit {}: {e}", i + 1)))?;
        }
        if !demand.is_finite() {
            return Err(EldError::InvalidInput("demand must be finite".into()));
        }
        let min_total: T = generators.iter().map(|g| g.p_min).sum();
        let max_total: T = generators.iter().map(|g| g.p_max).sum();
        if demand < min_total || demand > max_total {
            return Err(EldError::Infeasible {
                demand: demand.to_f64_lossy(),
                min_total: min_total.to_f64_lossy(),
                max_total: max_total.to_f64_lossy(),
            });
        }
        Ok(Self { generators, demand })
    }

    pub fn builtin(id: BuiltinProblem) -> Self {
        let rows: &[[f64; 5]] = match id {
            BuiltinProblem::Problem1 => &[
                [200.0, 450.0, 0.004, 5.3, 500.0],
                [150.0, 350.0, 0.006, 5.5, 400.0],
                [100.0, 325.0, 0.009, 5.8, 200.0],
            ],
            BuiltinProblem::Problem2Printed => &[
                [100.0, 600.0, 0.0025, 7.92, 561.0],
                [100.0, 400.0, 0.0019, 7.85, 310.0],
                [50.0, 200.0, 0.0048, 7.97, 78.0],
            ],
            BuiltinProblem::Problem2Corrected => &[
                [100.0, 600.0, 0.001562, 7.92, 561.0],
                [100.0, 400.0, 0.00194, 7.85, 310.0],
                [50.0, 200.0, 0.00482, 7.97, 78.0],
            ],
        };
        let demand = match id {
            BuiltinProblem::Problem1 => 975.0,
            BuiltinProblem::Problem2Printed | BuiltinProblem::Problem2Corrected => 450.0,
        };
        let generators = rows
            .iter()
            .map(|r| Generator {
                p_min: T::lit(r[0]),
                p_max: T::lit(r[1]),
                a: T::lit(r[2]),
                b: T::lit(r[3]),
                c: T::lit(r[4]),
            })
            .collect();
        Self::new(generators, T::lit(demand)).expect("built-in problems are feasible")
    }

    pub fn generators(&self) -> &[Generator<T>] {
        &self.generators
    }

    pub fn n_units(&self) -> usize {
        self.generators.len()
    }

    pub fn demand(&self) -> T {
        self.demand
    }

    pub fn min_total(&self) -> T {
        self.generators.iter().map(|g| g.p_min).sum()
    }

    pub fn max_total(&self) -> T {
        self.generators.iter().map(|g| g.p_max).sum()
    }

    fn check_dim(&self, d: &[T]) -> Result<()> {
        if d.len() != self.generators.len() {
            return Err(EldError::DimensionMismatch {
                expected: self.generators.len(),
                found: d.len(),
            });
        }
        Ok(())
    }

    pub fn evaluate_cost(&self, d: &Dispatch<T>) -> Result<T> {
        self.check_dim(d.as_slice())?;
        Ok(self.cost_of(d.as_slice()))
    }

    /// Signed Σ P − demand, MW.
    pub fn power_balance_residual(&self, d: &Dispatch<T>) -> Result<T> {
        self.check_dim(d.as_slice())?;
        Ok(self.residual_of(d.as_slice()))
    }

    /// True iff every output lies in its closed limit interval.
    pub fn within_limits(&self, d: &Dispatch<T>) -> Result<bool> {
        self.check_dim(d.as_slice())?;
        Ok(self
            .generators
            .iter()
            .zip(d.as_slice())
            .all(|(g, &p)| g.p_min <= p && p <= g.p_max))
    }

    pub fn limit_violation(&self, d: &Dispatch<T>) -> Result<T> {
        self.check_dim(d.as_slice())?;
        Ok(self.violation_of(d.as_slice()))
    }

    pub fn evaluate(&self, d: &Dispatch<T>) -> Result<Evaluation<T>> {
        self.check_dim(d.as_slice())?;
        let x = d.as_slice();
        Ok(Evaluation {
            cost: self.cost_of(x),
            balance_residual: self.residual_of(x),
            limit_violation: self.violation_of(x),
        })
    }

    /// `cost + penalty·(residual² + violation²)`.
    pub fn penalized_objective(&self, d: &Dispatch<T>, penalty: T) -> Result<T> {
        self.check_dim(d.as_slice())?;
        if !(penalty >= T::zero()) {
            return Err(EldError::InvalidInput(format!(
                "penalty coefficient {penalty} must be non-negative"
            )));
        }
        Ok(self.penalized_of(d.as_slice(), penalty))
    }

    pub fn repair_dispatch(&self, raw: &Dispatch<T>) -> Result<Dispatch<T>> {
        Ok(self.repair_with(raw, RepairSettings::default())?.dispatch)
    }

    /// Clamps every output to its limits, then spreads the balance residual
    /// evenly over the units that can still move in the needed direction,
    /// re-clamping after each pass.
    pub fn repair_with(&self, raw: &Dispatch<T>, settings: RepairSettings<T>) -> Result<Repaired<T>> {
        self.check_dim(raw.as_slice())?;
        let mut out = raw.as_slice().to_vec();
        let (residual, passes) = self.repair_in_place(&mut out, settings);
        Ok(Repaired {
            dispatch: Dispatch::from_vec_unchecked(out),
            residual,
            passes,
            converged: residual.abs() <= settings.tolerance,
        })
    }

    pub(crate) fn repair_in_place(&self, out: &mut [T], settings: RepairSettings<T>) -> (T, usize) {
        for (p, g) in out.iter_mut().zip(&self.generators) {
            *p = g.clamp(*p);
        }
        let mut residual = self.residual_of(out);
        let mut passes = 0;
        let mut free = Vec::with_capacity(out.len());
        while residual.abs() > settings.tolerance && passes < settings.max_passes {
            passes += 1;
            free.clear();
            let surplus = residual > T::zero();
            free.extend(
                self.generators
                    .iter()
                    .zip(out.iter())
                    .enumerate()
                    .filter_map(|(i, (g, &p))| {
                        let movable = if surplus { p > g.p_min } else { p < g.p_max };
                        movable.then_some(i)
                    }),
            );
            if free.is_empty() {
                break;
            }
            let share = residual / T::from_usize(free.len()).unwrap();
            for &i in &free {
                out[i] = self.generators[i].clamp(out[i] - share);
            }
            residual = self.residual_of(out);
        }
        (residual, passes)
    }

    /// Draws each output uniformly within its limits. The result generally
    /// violates the balance constraint.
    pub fn sample_uniform<S: Sampler>(&self, rng: &mut S) -> Vec<T> {
        self.generators.iter().map(|g| rng.uniform(g.p_min, g.p_max)).collect()
    }

    #[inline]
    pub(crate) fn cost_of(&self, x: &[T]) -> T {
        self.generators.iter().zip(x).map(|(g, &p)| g.cost(p)).sum()
    }

    #[inline]
    pub(crate) fn residual_of(&self, x: &[T]) -> T {
        x.iter().copied().sum::<T>() - self.demand
    }

    #[inline]
    pub(crate) fn violation_of(&self, x: &[T]) -> T {
        self.generators.iter().zip(x).map(|(g, &p)| g.violation(p)).sum()
    }

    #[inline]
    pub(crate) fn penalized_of(&self, x: &[T], penalty: T) -> T {
        let r = self.residual_of(x);
        let v = self.violation_of(x);
        self.cost_of(x) + penalty * (r * r + v * v)
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let file: ProblemFile<T> = toml::from_str(s).map_err(|e| EldError::Parse(e.to_string()))?;
        Self::new(file.generators, file.demand)
    }

    pub fn to_toml_string(&self) -> String {
        let file = ProblemFile {
            demand: self.demand,
            generators: self.generators.clone(),
        };
        toml::to_string(&file).expect("problem serializes to TOML")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| EldError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }
}

/// On-disk layout of a problem definition.
#[derive(Serialize, Deserialize)]
struct ProblemFile<T> {
    demand: T,
    generators: Vec<Generator<T>>,
}

/// The three-unit benchmark problems shipped with the library.
///
/// `Problem2Printed` uses the quadratic coefficients exactly as tabulated;
/// its optimum is about 4680.4 $/h. `Problem2Corrected` replaces them with
/// (0.001562, 0.00194, 0.00482), the set under which the published
/// 4652 $/h optimum and (206, 184, 60) MW dispatch are reproduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinProblem {
    Problem1,
    Problem2Printed,
    Problem2Corrected,
}

impl BuiltinProblem {
    pub const ALL: [BuiltinProblem; 3] = [
        BuiltinProblem::Problem1,
        BuiltinProblem::Problem2Printed,
        BuiltinProblem::Problem2Corrected,
    ];

    pub fn id(self) -> &'static str {
        match self {
            BuiltinProblem::Problem1 => "problem1",
            BuiltinProblem::Problem2Printed => "problem2-printed",
            BuiltinProblem::Problem2Corrected => "problem2-corrected",
        }
    }

    /// Published optimal cost for the benchmark, $/h (rounded to whole dollars).
    pub fn reported_cost(self) -> f64 {
        match self {
            BuiltinProblem::Problem1 => 8237.0,
            BuiltinProblem::Problem2Printed | BuiltinProblem::Problem2Corrected => 4652.0,
        }
    }
}

impl fmt::Display for BuiltinProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for BuiltinProblem {
    type Err = EldError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.id() == s)
            .ok_or_else(|| EldError::UnknownProblem(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> EldProblem<f64> {
        EldProblem::builtin(BuiltinProblem::Problem1)
    }

    fn d(v: &[f64]) -> Dispatch<f64> {
        Dispatch::new(v.to_vec()).unwrap()
    }

    fn two_unit(demand: f64) -> EldProblem<f64> {
        let g = Generator::new(0.0, 100.0, 0.01, 1.0, 0.0).unwrap();
        EldProblem::new(vec![g, g], demand).unwrap()
    }

    #[test]
    fn cost_of_published_dispatch() {
        // 3695 + 2821.25 + 1720, summed by hand from the unit rows
        let cost = p1().evaluate_cost(&d(&[450.0, 325.0, 200.0])).unwrap();
        assert!((cost - 8236.25).abs() < 1e-9);
        assert!((cost - 8237.0).abs() <= 1.0);
    }

    #[test]
    fn constant_terms_only() {
        let gens = vec![
            Generator::new(0.0, 10.0, 0.0, 0.0, 3.0).unwrap(),
            Generator::new(0.0, 10.0, 0.0, 0.0, 4.5).unwrap(),
        ];
        let p = EldProblem::new(gens, 5.0).unwrap();
        assert_eq!(p.evaluate_cost(&d(&[1.0, 7.0])).unwrap(), 7.5);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let p = p1();
        let short = d(&[450.0, 325.0]);
        assert!(matches!(
            p.evaluate_cost(&short),
            Err(EldError::DimensionMismatch { expected: 3, found: 2 })
        ));
        assert!(p.power_balance_residual(&short).is_err());
        assert!(p.within_limits(&short).is_err());
        assert!(p.repair_dispatch(&short).is_err());
        assert!(p.penalized_objective(&short, 1.0).is_err());
    }

    #[test]
    fn non_finite_dispatch_rejected() {
        assert!(Dispatch::new(vec![1.0, f64::NAN]).is_err());
        assert!(Dispatch::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn balance_residual() {
        let p = p1();
        assert_eq!(p.power_balance_residual(&d(&[450.0, 325.0, 200.0])).unwrap(), 0.0);
        assert_eq!(p.power_balance_residual(&d(&[450.0, 325.0, 201.0])).unwrap(), 1.0);
        let zero = two_unit(0.0);
        assert_eq!(zero.power_balance_residual(&d(&[0.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn limits() {
        let p = p1();
        assert!(p.within_limits(&d(&[450.0, 325.0, 200.0])).unwrap());
        assert!(!p.within_limits(&d(&[451.0, 325.0, 199.0])).unwrap());
        assert!(p.within_limits(&d(&[200.0, 150.0, 100.0])).unwrap());
        assert_eq!(p.limit_violation(&d(&[451.0, 325.0, 99.0])).unwrap(), 2.0);
    }

    #[test]
    fn repair_keeps_feasible_input() {
        let p = p1();
        let raw = d(&[450.0, 325.0, 200.0]);
        assert_eq!(p.repair_dispatch(&raw).unwrap(), raw);
    }

    #[test]
    fn repair_clamps_and_rebalances() {
        let p = p1();
        let fixed = p.repair_dispatch(&d(&[460.0, 325.0, 200.0])).unwrap();
        assert_eq!(fixed[0], 450.0);
        assert!(p.within_limits(&fixed).unwrap());
        assert!(p.power_balance_residual(&fixed).unwrap().abs() <= 1e-6);
    }

    #[test]
    fn repair_symmetric_split() {
        let p = two_unit(100.0);
        let fixed = p.repair_dispatch(&d(&[0.0, 0.0])).unwrap();
        assert_eq!(fixed.as_slice(), &[50.0, 50.0]);
    }

    #[test]
    fn repair_reports_exhausted_budget() {
        let p = p1();
        let settings = RepairSettings {
            tolerance: 1e-6,
            max_passes: 0,
        };
        let r = p.repair_with(&d(&[200.0, 150.0, 100.0]), settings).unwrap();
        assert!(!r.converged);
        assert_eq!(r.residual, -525.0);
    }

    #[test]
    fn penalty() {
        let p = p1();
        let feasible = d(&[450.0, 325.0, 200.0]);
        assert_eq!(
            p.penalized_objective(&feasible, 1e6).unwrap(),
            p.evaluate_cost(&feasible).unwrap()
        );
        let off = d(&[450.0, 325.0, 201.0]);
        let raw = p.evaluate_cost(&off).unwrap();
        assert_eq!(p.penalized_objective(&off, 0.0).unwrap(), raw);
        let pen = p.penalized_objective(&off, 1000.0).unwrap();
        assert!((pen - raw - 1000.0).abs() < 1e-9);
        assert!(p.penalized_objective(&off, -1.0).is_err());
    }

    #[test]
    fn builtin_tables() {
        let p = p1();
        assert_eq!(p.n_units(), 3);
        assert_eq!(p.demand(), 975.0);
        assert_eq!(
            p.generators()[0],
            Generator {
                p_min: 200.0,
                p_max: 450.0,
                a: 0.004,
                b: 5.3,
                c: 500.0
            }
        );

        let printed: EldProblem<f64> = EldProblem::builtin(BuiltinProblem::Problem2Printed);
        assert_eq!(printed.demand(), 450.0);
        assert_eq!(
            printed.generators()[2],
            Generator {
                p_min: 50.0,
                p_max: 200.0,
                a: 0.0048,
                b: 7.97,
                c: 78.0
            }
        );
        let a: Vec<f64> = printed.generators().iter().map(|g| g.a).collect();
        assert_eq!(a, [0.0025, 0.0019, 0.0048]);

        let corrected: EldProblem<f64> = EldProblem::builtin(BuiltinProblem::Problem2Corrected);
        let a: Vec<f64> = corrected.generators().iter().map(|g| g.a).collect();
        assert_eq!(a, [0.001562, 0.00194, 0.00482]);
    }

    #[test]
    fn builtin_ids() {
        for b in BuiltinProblem::ALL {
            assert_eq!(b.id().parse::<BuiltinProblem>().unwrap(), b);
        }
        assert!(matches!(
            "problem3".parse::<BuiltinProblem>(),
            Err(EldError::UnknownProblem(_))
        ));
    }

    #[test]
    fn construction_checks() {
        let g = Generator {
            p_min: 10.0,
            p_max: 5.0,
            a: 0.1,
            b: 1.0,
            c: 0.0,
        };
        assert!(EldProblem::new(vec![g], 7.0).is_err());
        let g = Generator {
            p_min: 0.0,
            p_max: 5.0,
            a: -0.1,
            b: 1.0,
            c: 0.0,
        };
        assert!(EldProblem::new(vec![g], 1.0).is_err());
        assert!(EldProblem::<f64>::new(vec![], 0.0).is_err());
        let g = Generator::new(0.0, 100.0, 0.01, 1.0, 0.0).unwrap();
        assert!(matches!(
            EldProblem::new(vec![g, g], 201.0),
            Err(EldError::Infeasible { .. })
        ));
    }

    #[test]
    fn toml_round_trip_is_exact() {
        for b in BuiltinProblem::ALL {
            let p: EldProblem<f64> = EldProblem::builtin(b);
            let back = EldProblem::from_toml_str(&p.to_toml_string()).unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn toml_parse_errors() {
        assert!(matches!(
            EldProblem::<f64>::from_toml_str("demand = \"x\""),
            Err(EldError::Parse(_))
        ));
        let missing = std::path::Path::new("/nonexistent/problem.toml");
        assert!(matches!(EldProblem::<f64>::load(missing), Err(EldError::Io { .. })));
    }
}
