//! Artificial bee colony: employed bees refine their own food source,
//! onlookers pick sources by roulette wheel, scouts replace a source that
//! has failed to improve for more than `limit` trials.

use std::time::Instant;

use crate::error::{EldError, Result};
use crate::problem::EldProblem;
use crate::rng::{RngStream, Sampler};
use crate::scalar::Scalar;
use crate::swarm::{argmin, should_stop, ConstraintHandling, ConvergenceTrace, Evaluator, RunReport, StopCriteria};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcConfig<T> {
    /// Number of food sources; also the number of employed and of onlooker bees.
    pub colony_size: usize,
    /// Abandonment threshold. `None` means `colony_size × N`.
    pub limit: Option<usize>,
    pub stop: StopCriteria<T>,
    pub constraints: ConstraintHandling<T>,
}

impl<T: Scalar> Default for AbcConfig<T> {
    fn default() -> Self {
        Self {
            colony_size: 10,
            limit: None,
            stop: StopCriteria::default(),
            constraints: ConstraintHandling::Repair,
        }
    }
}

impl<T: Scalar> AbcConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.colony_size < 2 {
            return Err(EldError::InvalidInput("colony_size must be at least 2".into()));
        }
        if self.limit == Some(0) {
            return Err(EldError::InvalidInput("limit must be at least 1".into()));
        }
        self.stop.validate()?;
        self.constraints.validate()
    }

    pub fn effective_limit(&self, n_units: usize) -> usize {
        self.limit.unwrap_or(self.colony_size * n_units)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbcState<T> {
    pub sources: Vec<Vec<T>>,
    pub costs: Vec<T>,
    pub trials: Vec<usize>,
    pub best_source: Vec<T>,
    pub best_cost: T,
}

/// Outcome of one greedy neighbour trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial<T> {
    pub candidate: Vec<T>,
    pub cost: T,
    pub accepted: bool,
}

impl<T: Scalar> AbcState<T> {
    pub fn init<S: Sampler>(evaluator: &mut Evaluator<'_, T>, config: &AbcConfig<T>, rng: &mut S) -> Result<Self> {
        config.validate()?;
        let mut sources = Vec::with_capacity(config.colony_size);
        let mut costs = Vec::with_capacity(config.colony_size);
        for _ in 0..config.colony_size {
            let x = evaluator.random_candidate(rng);
            costs.push(evaluator.score(&x));
            sources.push(x);
        }
        let best = argmin(&costs);
        Ok(Self {
            best_source: sources[best].clone(),
            best_cost: costs[best],
            trials: vec![0; config.colony_size],
            sources,
            costs,
        })
    }

    /// Perturbs one random dimension `j` of source `i` against a random
    /// partner `k ≠ i`: `v_ij = x_ij + φ·(x_ij − x_kj)`, `φ ∈ [−1, 1]`.
    /// The candidate replaces source `i` only if strictly cheaper; otherwise
    /// the source's trial counter is incremented.
    pub fn neighbor_candidate<S: Sampler>(
        &mut self,
        i: usize,
        evaluator: &mut Evaluator<'_, T>,
        rng: &mut S,
    ) -> Trial<T> {
        let n_sources = self.sources.len();
        let j = rng.index(self.sources[i].len());
        let mut k = rng.index(n_sources - 1);
        if k >= i {
            k += 1;
        }
        let phi: T = rng.uniform(-T::one(), T::one());
        let mut candidate = self.sources[i].clone();
        candidate[j] = candidate[j] + phi * (self.sources[i][j] - self.sources[k][j]);
        evaluator.prepare(&mut candidate);
        let cost = evaluator.score(&candidate);
        let accepted = cost < self.costs[i];
        if accepted {
            self.sources[i].clone_from(&candidate);
            self.costs[i] = cost;
            self.trials[i] = 0;
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best_source.clone_from(&candidate);
            }
        } else {
            self.trials[i] += 1;
        }
        Trial {
            candidate,
            cost,
            accepted,
        }
    }

    pub fn employed_phase<S: Sampler>(&mut self, evaluator: &mut Evaluator<'_, T>, rng: &mut S) {
        for i in 0..self.sources.len() {
            self.neighbor_candidate(i, evaluator, rng);
        }
    }

    pub fn onlooker_probabilities(&self) -> Vec<T> {
        roulette_probabilities(&self.costs)
    }

    /// One onlooker per source, each choosing a source by roulette wheel.
    pub fn onlooker_phase<S: Sampler>(&mut self, evaluator: &mut Evaluator<'_, T>, rng: &mut S) {
        for _ in 0..self.sources.len() {
            let probs = self.onlooker_probabilities();
            let i = spin_wheel(&probs, rng.uniform(T::zero(), T::one()));
            self.neighbor_candidate(i, evaluator, rng);
        }
    }

    /// Replaces the most-tried source whose counter exceeds `limit` (lowest
    /// index on ties) with a fresh random source. At most one per call.
    /// The remembered best is kept.
    pub fn scout_phase<S: Sampler>(
        &mut self,
        limit: usize,
        evaluator: &mut Evaluator<'_, T>,
        rng: &mut S,
    ) -> Option<usize> {
        let mut worn: Option<usize> = None;
        for (i, &t) in self.trials.iter().enumerate() {
            if t > limit && worn.is_none_or(|w| t > self.trials[w]) {
                worn = Some(i);
            }
        }
        let i = worn?;
        let x = evaluator.random_candidate(rng);
        let cost = evaluator.score(&x);
        self.sources[i] = x;
        self.costs[i] = cost;
        self.trials[i] = 0;
        if cost < self.best_cost {
            self.best_cost = cost;
            self.best_source.clone_from(&self.sources[i]);
        }
        Some(i)
    }

    pub fn cycle<S: Sampler>(&mut self, limit: usize, evaluator: &mut Evaluator<'_, T>, rng: &mut S) {
        self.employed_phase(evaluator, rng);
        self.onlooker_phase(evaluator, rng);
        self.scout_phase(limit, evaluator, rng);
    }
}

/// Roulette probabilities from costs via `fit = 1/(1+f)` for `f ≥ 0` and
/// `fit = 1 + |f|` otherwise.
pub fn roulette_probabilities<T: Scalar>(costs: &[T]) -> Vec<T> {
    let fits: Vec<T> = costs
        .iter()
        .map(|&f| {
            if f >= T::zero() {
                T::one() / (T::one() + f)
            } else {
                T::one() + f.abs()
            }
        })
        .collect();
    let total: T = fits.iter().copied().sum();
    fits.into_iter().map(|f| f / total).collect()
}

fn spin_wheel<T: Scalar>(probs: &[T], u: T) -> usize {
    let mut acc = T::zero();
    for (i, &p) in probs.iter().enumerate() {
        acc = acc + p;
        if u <= acc {
            return i;
        }
    }
    probs.len() - 1
}

pub fn run<T: Scalar>(problem: &EldProblem<T>, config: &AbcConfig<T>, seed: u64) -> Result<RunReport<T>> {
    let started = Instant::now();
    let mut rng = RngStream::new(seed);
    let mut evaluator = Evaluator::new(problem, config.constraints);
    let mut state = AbcState::init(&mut evaluator, config, &mut rng)?;
    let limit = config.effective_limit(problem.n_units());
    let mut trace = ConvergenceTrace::new();
    let mut iteration = 0;
    loop {
        iteration += 1;
        state.cycle(limit, &mut evaluator, &mut rng);
        trace.push(state.best_cost, evaluator.evaluations());
        if should_stop(&config.stop, &trace, iteration) {
            break;
        }
    }
    Ok(RunReport::assemble(
        &evaluator,
        &state.best_source,
        trace,
        seed,
        started,
    ))
}
