//! Exact equal-incremental-cost dispatch by lambda iteration.
//!
//! For a trial incremental cost λ each unit runs at
//! `clamp((λ − b) / 2a, p_min, p_max)`. Total output is non-decreasing in
//! λ, so bisection over the range of incremental costs finds the λ at which
//! supply meets demand.

use crate::error::{EldError, Result};
use crate::problem::{Dispatch, EldProblem};
use crate::scalar::Scalar;

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution<T> {
    pub dispatch: Dispatch<T>,
    /// System incremental cost, $/MWh.
    pub lambda: T,
    pub cost: T,
    /// Units held at a limit, in ascending order.
    pub binding_units: Vec<usize>,
    /// Σ P − demand of the returned dispatch.
    pub residual: T,
    pub iterations: usize,
}

/// Solves with the default balance tolerance for `T`.
pub fn solve_default<T: Scalar>(problem: &EldProblem<T>) -> Result<OracleSolution<T>> {
    solve(problem, T::oracle_tolerance())
}

pub fn solve<T: Scalar>(problem: &EldProblem<T>, tol: T) -> Result<OracleSolution<T>> {
    let gens = problem.generators();
    if let Some(i) = gens.iter().position(|g| !(g.a > T::zero())) {
        return Err(EldError::InvalidInput(format!(
            "unit {} has a non-positive quadratic coefficient; lambda iteration needs strictly convex costs",
            i + 1
        )));
    }
    if !(tol > T::zero()) {
        return Err(EldError::InvalidInput("oracle tolerance must be positive".into()));
    }
    let two = T::lit(2.0);
    let unclamped = |lambda: T| -> Vec<T> { gens.iter().map(|g| (lambda - g.b) / (two * g.a)).collect() };
    let total_at = |lambda: T| -> T { gens.iter().map(|g| g.clamp((lambda - g.b) / (two * g.a))).sum::<T>() };

    let mut lo = gens
        .iter()
        .map(|g| g.incremental_cost(g.p_min))
        .fold(T::infinity(), T::min);
    let mut hi = gens
        .iter()
        .map(|g| g.incremental_cost(g.p_max))
        .fold(T::neg_infinity(), T::max);
    let demand = problem.demand();

    let mut lambda = (lo + hi) / two;
    let mut iterations = 0;
    while iterations < MAX_BISECTIONS {
        iterations += 1;
        lambda = (lo + hi) / two;
        let r = total_at(lambda) - demand;
        if r.abs() <= tol {
            break;
        }
        if r < T::zero() {
            lo = lambda;
        } else {
            hi = lambda;
        }
    }

    let raw = unclamped(lambda);
    let binding_units: Vec<usize> = gens
        .iter()
        .zip(&raw)
        .enumerate()
        .filter_map(|(i, (g, &p))| (p <= g.p_min || p >= g.p_max).then_some(i))
        .collect();
    let mut outputs: Vec<T> = gens.iter().zip(&raw).map(|(g, &p)| g.clamp(p)).collect();

    // Remove the leftover bisection residual along the free units, keeping
    // their incremental costs equal.
    let residual = problem.residual_of(&outputs);
    let free: Vec<usize> = (0..gens.len()).filter(|i| !binding_units.contains(i)).collect();
    if !free.is_empty() && residual != T::zero() {
        let weight = |i: usize| T::one() / (two * gens[i].a);
        let total_weight: T = free.iter().map(|&i| weight(i)).sum();
        for &i in &free {
            outputs[i] = gens[i].clamp(outputs[i] - residual * weight(i) / total_weight);
        }
        lambda = lambda - residual / total_weight;
    }

    let residual = problem.residual_of(&outputs);
    let cost = problem.cost_of(&outputs);
    Ok(OracleSolution {
        dispatch: Dispatch::from_vec_unchecked(outputs),
        lambda,
        cost,
        binding_units,
        residual,
        iterations,
    })
}
