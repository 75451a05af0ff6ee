//! Infrastructure shared by the three metaheuristics: constraint handling,
//! stopping rules, convergence traces and the run report.

use std::io::{self, Write};
use std::time::{Duration, Instant};

use crate::error::{EldError, Result};
use crate::problem::{Dispatch, EldProblem, RepairSettings};
use crate::rng::Sampler;
use crate::scalar::Scalar;

/// How candidates that break the balance or limit constraints are treated.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ConstraintHandling<T> {
    /// Every candidate is projected onto the feasible set before evaluation.
    #[default]
    Repair,
    /// Candidates are clamped to unit limits only and scored with the
    /// penalized objective. The final best is repaired before reporting.
    Penalty { coefficient: T },
}

impl<T: Scalar> ConstraintHandling<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ConstraintHandling::Repair => Ok(()),
            ConstraintHandling::Penalty { coefficient } if coefficient >= T::zero() => Ok(()),
            ConstraintHandling::Penalty { coefficient } => Err(EldError::InvalidInput(format!(
                "penalty coefficient {coefficient} must be non-negative"
            ))),
        }
    }
}

/// Objective oracle handed to the optimizers. Counts evaluations.
#[derive(Debug)]
pub struct Evaluator<'a, T> {
    problem: &'a EldProblem<T>,
    handling: ConstraintHandling<T>,
    repair: RepairSettings<T>,
    evaluations: u64,
}

impl<'a, T: Scalar> Evaluator<'a, T> {
    pub fn new(problem: &'a EldProblem<T>, handling: ConstraintHandling<T>) -> Self {
        Self {
            problem,
            handling,
            repair: RepairSettings::default(),
            evaluations: 0,
        }
    }

    pub fn problem(&self) -> &'a EldProblem<T> {
        self.problem
    }

    pub fn handling(&self) -> ConstraintHandling<T> {
        self.handling
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// Maps a raw candidate into the search space in place.
    pub fn prepare(&self, x: &mut [T]) {
        match self.handling {
            ConstraintHandling::Repair => {
                self.problem.repair_in_place(x, self.repair);
            }
            ConstraintHandling::Penalty { .. } => {
                for (p, g) in x.iter_mut().zip(self.problem.generators()) {
                    *p = g.clamp(*p);
                }
            }
        }
    }

    pub fn score(&mut self, x: &[T]) -> T {
        self.evaluations += 1;
        match self.handling {
            ConstraintHandling::Repair => self.problem.cost_of(x),
            ConstraintHandling::Penalty { coefficient } => self.problem.penalized_of(x, coefficient),
        }
    }

    /// Uniform point within the unit limits, prepared but not scored.
    pub fn random_candidate<S: Sampler>(&self, rng: &mut S) -> Vec<T> {
        let mut x = self.problem.sample_uniform(rng);
        self.prepare(&mut x);
        x
    }

    /// Reportable dispatch and its true cost for a search-space point.
    pub fn finish(&self, best: &[T]) -> (Dispatch<T>, T) {
        let mut x = best.to_vec();
        if let ConstraintHandling::Penalty { .. } = self.handling {
            self.problem.repair_in_place(&mut x, self.repair);
        }
        let cost = self.problem.cost_of(&x);
        (Dispatch::from_vec_unchecked(x), cost)
    }
}

/// When an iterative optimizer halts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopCriteria<T> {
    pub max_iterations: usize,
    pub target_cost: Option<T>,
    /// Number of trailing iterations inspected for stagnation; 0 disables the rule.
    pub stagnation_window: usize,
    pub improvement_epsilon: T,
}

impl<T: Scalar> Default for StopCriteria<T> {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            target_cost: None,
            stagnation_window: 20,
            improvement_epsilon: T::lit(1e-6),
        }
    }
}

impl<T: Scalar> StopCriteria<T> {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(EldError::InvalidInput("max_iterations must be at least 1".into()));
        }
        if !(self.improvement_epsilon >= T::zero()) {
            return Err(EldError::InvalidInput(
                "improvement_epsilon must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// True once `iteration` reaches the cap, the latest best reaches the
/// target, or the last `stagnation_window` iterations improved the best by
/// less than `improvement_epsilon`.
pub fn should_stop<T: Scalar>(criteria: &StopCriteria<T>, trace: &ConvergenceTrace<T>, iteration: usize) -> bool {
    if iteration >= criteria.max_iterations {
        return true;
    }
    let Some(last) = trace.last() else {
        return false;
    };
    if criteria.target_cost.is_some_and(|t| last <= t) {
        return true;
    }
    let w = criteria.stagnation_window;
    let costs = trace.best_costs();
    if w > 0 && costs.len() > w {
        let earlier = costs[costs.len() - 1 - w];
        return earlier - last < criteria.improvement_epsilon;
    }
    false
}

/// Best objective value after each iteration, with the cumulative number
/// of objective evaluations at that point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceTrace<T> {
    best_cost: Vec<T>,
    evaluations: Vec<u64>,
}

impl<T: Scalar> ConvergenceTrace<T> {
    pub fn new() -> Self {
        Self {
            best_cost: Vec::new(),
            evaluations: Vec::new(),
        }
    }

    pub fn push(&mut self, best_cost: T, evaluations: u64) {
        debug_assert!(self.last().is_none_or(|prev| best_cost <= prev));
        self.best_cost.push(best_cost);
        self.evaluations.push(evaluations);
    }

    pub fn len(&self) -> usize {
        self.best_cost.len()
    }

    pub fn is_empty(&self) -> bool {
        self.best_cost.is_empty()
    }

    pub fn last(&self) -> Option<T> {
        self.best_cost.last().copied()
    }

    pub fn best_costs(&self) -> &[T] {
        &self.best_cost
    }

    pub fn evaluations(&self) -> &[u64] {
        &self.evaluations
    }

    pub fn is_non_increasing(&self) -> bool {
        self.best_cost.windows(2).all(|w| w[1] <= w[0])
    }

    /// First iteration (1-based) whose best cost is at or below `threshold`,
    /// with the evaluations spent up to then.
    pub fn first_reaching(&self, threshold: T) -> Option<(usize, u64)> {
        self.best_cost
            .iter()
            .position(|&c| c <= threshold)
            .map(|i| (i + 1, self.evaluations[i]))
    }

    /// Writes `iteration,best_cost` rows, iterations numbered from 1.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "iteration,best_cost")?;
        for (i, c) in self.best_cost.iter().enumerate() {
            writeln!(out, "{},{}", i + 1, format_cost(c.to_f64_lossy()))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// Fixed six decimals for ordinary magnitudes, scientific notation below 1
/// so that at least six significant digits survive.
pub fn format_cost(x: f64) -> String {
    if x != 0.0 && x.abs() < 1.0 {
        format!("{x:.6e}")
    } else {
        format!("{x:.6}")
    }
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport<T> {
    pub best_dispatch: Dispatch<T>,
    pub best_cost: T,
    pub iterations_used: usize,
    pub evaluations: u64,
    pub wall_time: Duration,
    pub trace: ConvergenceTrace<T>,
    pub seed: u64,
}

impl<T: Scalar> RunReport<T> {
    pub(crate) fn assemble(
        evaluator: &Evaluator<'_, T>,
        best: &[T],
        trace: ConvergenceTrace<T>,
        seed: u64,
        started: Instant,
    ) -> Self {
        let (best_dispatch, best_cost) = evaluator.finish(best);
        Self {
            best_dispatch,
            best_cost,
            iterations_used: trace.len(),
            evaluations: evaluator.evaluations(),
            wall_time: started.elapsed(),
            trace,
            seed,
        }
    }

    /// Equality of everything except wall time.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.best_dispatch == other.best_dispatch
            && self.best_cost.to_f64_lossy().to_bits() == other.best_cost.to_f64_lossy().to_bits()
            && self.iterations_used == other.iterations_used
            && self.evaluations == other.evaluations
            && self.trace == other.trace
            && self.seed == other.seed
    }
}

/// Index of the smallest value; ties go to the lowest index.
pub(crate) fn argmin<T: Scalar>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}
