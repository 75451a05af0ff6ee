//! Global-best particle swarm optimization with constant inertia weight.

use std::time::Instant;

use crate::error::{EldError, Result};
use crate::problem::EldProblem;
use crate::rng::{RngStream, Sampler};
use crate::scalar::Scalar;
use crate::swarm::{argmin, should_stop, ConstraintHandling, ConvergenceTrace, Evaluator, RunReport, StopCriteria};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsoConfig<T> {
    pub swarm_size: usize,
    /// Inertia weight applied to the previous velocity.
    pub w: T,
    /// Cognitive (personal best) acceleration constant.
    pub c1: T,
    /// Social (global best) acceleration constant.
    pub c2: T,
    /// Velocity limit per dimension as a fraction of that unit's output range.
    pub v_max_fraction: T,
    pub stop: StopCriteria<T>,
    pub constraints: ConstraintHandling<T>,
}

impl<T: Scalar> Default for PsoConfig<T> {
    fn default() -> Self {
        Self {
            swarm_size: 20,
            w: T::lit(0.7),
            c1: T::lit(1.5),
            c2: T::lit(1.5),
            v_max_fraction: T::lit(0.5),
            stop: StopCriteria::default(),
            constraints: ConstraintHandling::Repair,
        }
    }
}

impl<T: Scalar> PsoConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 2 {
            return Err(EldError::InvalidInput("swarm_size must be at least 2".into()));
        }
        for (name, v) in [("w", self.w), ("c1", self.c1), ("c2", self.c2)] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(EldError::InvalidInput(format!(
                    "{name} must be finite and non-negative"
                )));
            }
        }
        if !(self.v_max_fraction > T::zero() && self.v_max_fraction <= T::one()) {
            return Err(EldError::InvalidInput("v_max_fraction must lie in (0, 1]".into()));
        }
        self.stop.validate()?;
        self.constraints.validate()
    }
}

/// Swarm in flight. Row `i` of each matrix belongs to particle `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsoState<T> {
    pub positions: Vec<Vec<T>>,
    pub velocities: Vec<Vec<T>>,
    pub costs: Vec<T>,
    pub pbest_positions: Vec<Vec<T>>,
    pub pbest_costs: Vec<T>,
    pub gbest_position: Vec<T>,
    pub gbest_cost: T,
    /// Per-dimension velocity limit, MW per iteration.
    pub v_max: Vec<T>,
}

impl<T: Scalar> PsoState<T> {
    pub fn init<S: Sampler>(evaluator: &mut Evaluator<'_, T>, config: &PsoConfig<T>, rng: &mut S) -> Result<Self> {
        config.validate()?;
        let problem = evaluator.problem();
        let v_max: Vec<T> = problem
            .generators()
            .iter()
            .map(|g| config.v_max_fraction * g.range())
            .collect();
        let mut positions = Vec::with_capacity(config.swarm_size);
        let mut velocities = Vec::with_capacity(config.swarm_size);
        let mut costs = Vec::with_capacity(config.swarm_size);
        for _ in 0..config.swarm_size {
            let x = evaluator.random_candidate(rng);
            costs.push(evaluator.score(&x));
            positions.push(x);
            velocities.push(v_max.iter().map(|&vm| rng.uniform(-vm, vm)).collect());
        }
        let best = argmin(&costs);
        Ok(Self {
            pbest_positions: positions.clone(),
            pbest_costs: costs.clone(),
            gbest_position: positions[best].clone(),
            gbest_cost: costs[best],
            positions,
            velocities,
            costs,
            v_max,
        })
    }

    /// `v ← w·v + c1·r1·(pbest − x) + c2·r2·(gbest − x)`, with fresh
    /// `r1, r2 ∈ [0, 1]` for every particle and dimension, clamped to ±v_max.
    pub fn update_velocity<S: Sampler>(&mut self, config: &PsoConfig<T>, rng: &mut S) {
        for i in 0..self.positions.len() {
            let x = &self.positions[i];
            let pbest = &self.pbest_positions[i];
            for (j, v) in self.velocities[i].iter_mut().enumerate() {
                let r1: T = rng.uniform(T::zero(), T::one());
                let r2: T = rng.uniform(T::zero(), T::one());
                let raw = config.w * *v
                    + config.c1 * r1 * (pbest[j] - x[j])
                    + config.c2 * r2 * (self.gbest_position[j] - x[j]);
                *v = raw.max(-self.v_max[j]).min(self.v_max[j]);
            }
        }
    }

    /// `x ← x + v`, then constraint handling, evaluation and best bookkeeping.
    /// Bests move only on strict improvement.
    pub fn update_position(&mut self, evaluator: &mut Evaluator<'_, T>) {
        for i in 0..self.positions.len() {
            let x = &mut self.positions[i];
            for (p, &v) in x.iter_mut().zip(&self.velocities[i]) {
                *p = *p + v;
            }
            evaluator.prepare(x);
            let cost = evaluator.score(x);
            self.costs[i] = cost;
            if cost < self.pbest_costs[i] {
                self.pbest_costs[i] = cost;
                self.pbest_positions[i].clone_from(x);
                if cost < self.gbest_cost {
                    self.gbest_cost = cost;
                    self.gbest_position.clone_from(x);
                }
            }
        }
    }
}

pub fn run<T: Scalar>(problem: &EldProblem<T>, config: &PsoConfig<T>, seed: u64) -> Result<RunReport<T>> {
    let started = Instant::now();
    let mut rng = RngStream::new(seed);
    let mut evaluator = Evaluator::new(problem, config.constraints);
    let mut state = PsoState::init(&mut evaluator, config, &mut rng)?;
    let mut trace = ConvergenceTrace::new();
    let mut iteration = 0;
    loop {
        iteration += 1;
        state.update_velocity(config, &mut rng);
        state.update_position(&mut evaluator);
        trace.push(state.gbest_cost, evaluator.evaluations());
        if should_stop(&config.stop, &trace, iteration) {
            break;
        }
    }
    Ok(RunReport::assemble(
        &evaluator,
        &state.gbest_position,
        trace,
        seed,
        started,
    ))
}
