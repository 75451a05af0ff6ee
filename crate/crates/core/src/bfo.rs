//! Bacterial foraging optimization: chemotaxis (tumble then swim),
//! health-ranked reproduction and probabilistic elimination-dispersal.
//!
//! Cell-to-cell attraction is not modelled; bacteria see the raw objective.

use std::time::Instant;

use crate::error::{EldError, Result};
use crate::problem::EldProblem;
use crate::rng::{RngStream, Sampler};
use crate::scalar::Scalar;
use crate::swarm::{argmin, ConstraintHandling, ConvergenceTrace, Evaluator, RunReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfoConfig<T> {
    /// Population size S; must be even.
    pub n_bacteria: usize,
    /// Chemotactic steps per reproduction epoch (Nc).
    pub n_chemotactic: usize,
    /// Maximum swim length (Ns).
    pub n_swim: usize,
    /// Reproduction epochs per elimination-dispersal epoch (Nre).
    pub n_reproduction: usize,
    /// Elimination-dispersal epochs (Ned).
    pub n_elimination: usize,
    /// Dispersal probability per bacterium.
    pub p_ed: f64,
    /// Tumble length in MW. `None` means a tenth of the narrowest unit range.
    pub step_size: Option<T>,
    pub constraints: ConstraintHandling<T>,
}

impl<T: Scalar> Default for BfoConfig<T> {
    fn default() -> Self {
        Self {
            n_bacteria: 10,
            n_chemotactic: 25,
            n_swim: 4,
            n_reproduction: 4,
            n_elimination: 2,
            p_ed: 0.25,
            step_size: None,
            constraints: ConstraintHandling::Repair,
        }
    }
}

impl<T: Scalar> BfoConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n_bacteria < 2 || !self.n_bacteria.is_multiple_of(2) {
            return Err(EldError::InvalidInput("n_bacteria must be even and at least 2".into()));
        }
        if self.n_chemotactic < 1 || self.n_reproduction < 1 || self.n_elimination < 1 {
            return Err(EldError::InvalidInput(
                "n_chemotactic, n_reproduction and n_elimination must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.p_ed) {
            return Err(EldError::InvalidInput("p_ed must lie in [0, 1]".into()));
        }
        if let Some(c) = self.step_size {
            if !(c > T::zero()) || !c.is_finite() {
                return Err(EldError::InvalidInput("step_size must be positive".into()));
            }
        }
        self.constraints.validate()
    }

    pub fn effective_step_size(&self, problem: &EldProblem<T>) -> T {
        self.step_size.unwrap_or_else(|| {
            let narrowest = problem
                .generators()
                .iter()
                .map(|g| g.range())
                .fold(T::infinity(), T::min);
            T::lit(0.1) * narrowest
        })
    }

    /// Chemotactic steps in a full run, i.e. the trace length.
    pub fn total_chemotactic_steps(&self) -> usize {
        self.n_chemotactic * self.n_reproduction * self.n_elimination
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BfoState<T> {
    pub positions: Vec<Vec<T>>,
    pub costs: Vec<T>,
    /// Sum of each bacterium's cost at the end of every chemotactic step in
    /// the current reproduction epoch. Lower is healthier.
    pub health: Vec<T>,
    pub step_sizes: Vec<T>,
    pub best_position: Vec<T>,
    pub best_cost: T,
}

/// Unit vector `Δ/‖Δ‖` with `Δ` uniform on `[−1, 1]^n`, redrawn if zero.
pub fn tumble_direction<T: Scalar, S: Sampler>(n_dims: usize, rng: &mut S) -> Vec<T> {
    assert!(n_dims >= 1, "tumble needs at least one dimension");
    loop {
        let delta: Vec<T> = (0..n_dims).map(|_| rng.uniform(-T::one(), T::one())).collect();
        if let Some(dir) = normalize(delta) {
            return dir;
        }
    }
}

fn normalize<T: Scalar>(delta: Vec<T>) -> Option<Vec<T>> {
    let norm = delta.iter().map(|&d| d * d).sum::<T>().sqrt();
    (norm > T::zero()).then(|| delta.into_iter().map(|d| d / norm).collect())
}

impl<T: Scalar> BfoState<T> {
    pub fn init<S: Sampler>(evaluator: &mut Evaluator<'_, T>, config: &BfoConfig<T>, rng: &mut S) -> Result<Self> {
        config.validate()?;
        let step = config.effective_step_size(evaluator.problem());
        let mut positions = Vec::with_capacity(config.n_bacteria);
        let mut costs = Vec::with_capacity(config.n_bacteria);
        for _ in 0..config.n_bacteria {
            let x = evaluator.random_candidate(rng);
            costs.push(evaluator.score(&x));
            positions.push(x);
        }
        let best = argmin(&costs);
        Ok(Self {
            best_position: positions[best].clone(),
            best_cost: costs[best],
            health: vec![T::zero(); config.n_bacteria],
            step_sizes: vec![step; config.n_bacteria],
            positions,
            costs,
        })
    }

    fn record(&mut self, i: usize) {
        if self.costs[i] < self.best_cost {
            self.best_cost = self.costs[i];
            self.best_position.clone_from(&self.positions[i]);
        }
    }

    /// Tumble bacterium `i` one step along a random unit direction, then
    /// keep swimming the same way while each step strictly lowers the cost,
    /// for at most `n_swim` extra steps. Returns the swim steps taken.
    pub fn chemotactic_step<S: Sampler>(
        &mut self,
        i: usize,
        config: &BfoConfig<T>,
        evaluator: &mut Evaluator<'_, T>,
        rng: &mut S,
    ) -> usize {
        let direction: Vec<T> = tumble_direction(self.positions[i].len(), rng);
        self.chemotactic_step_along(i, &direction, config.n_swim, evaluator)
    }

    pub fn chemotactic_step_along(
        &mut self,
        i: usize,
        direction: &[T],
        n_swim: usize,
        evaluator: &mut Evaluator<'_, T>,
    ) -> usize {
        let step = self.step_sizes[i];
        let mut last = self.costs[i];
        self.advance(i, direction, step, evaluator);
        let mut swims = 0;
        while swims < n_swim && self.costs[i] < last {
            last = self.costs[i];
            self.advance(i, direction, step, evaluator);
            swims += 1;
        }
        self.health[i] = self.health[i] + self.costs[i];
        swims
    }

    fn advance(&mut self, i: usize, direction: &[T], step: T, evaluator: &mut Evaluator<'_, T>) {
        let x = &mut self.positions[i];
        for (p, &d) in x.iter_mut().zip(direction) {
            *p = *p + step * d;
        }
        evaluator.prepare(x);
        self.costs[i] = evaluator.score(x);
        self.record(i);
    }

    /// The healthier half (lowest accumulated cost, stable on ties) is
    /// kept and duplicated over the other half; health counters reset.
    pub fn reproduce(&mut self) {
        let s = self.positions.len();
        let mut order: Vec<usize> = (0..s).collect();
        order.sort_by(|&a, &b| self.health[a].partial_cmp(&self.health[b]).expect("finite health"));
        let survivors = &order[..s / 2];
        let pick = |v: &Vec<T>| -> Vec<T> { survivors.iter().chain(survivors).map(|&i| v[i]).collect() };
        self.positions = survivors
            .iter()
            .chain(survivors)
            .map(|&i| self.positions[i].clone())
            .collect();
        self.costs = pick(&self.costs);
        self.step_sizes = pick(&self.step_sizes);
        self.health = vec![T::zero(); s];
    }

    /// Each bacterium is independently moved to a fresh random position with
    /// probability `p_ed`. Returns how many were dispersed.
    pub fn eliminate_disperse<S: Sampler>(
        &mut self,
        p_ed: f64,
        evaluator: &mut Evaluator<'_, T>,
        rng: &mut S,
    ) -> usize {
        let mut dispersed = 0;
        for i in 0..self.positions.len() {
            if rng.chance(p_ed) {
                self.positions[i] = evaluator.random_candidate(rng);
                self.costs[i] = evaluator.score(&self.positions[i]);
                self.record(i);
                dispersed += 1;
            }
        }
        dispersed
    }
}

/// Full elimination-dispersal / reproduction / chemotaxis loop. The trace
/// gets one entry per chemotactic sweep over the population. Dispersal after
/// the final epoch is skipped since no search follows it.
pub fn run<T: Scalar>(problem: &EldProblem<T>, config: &BfoConfig<T>, seed: u64) -> Result<RunReport<T>> {
    let started = Instant::now();
    let mut rng = RngStream::new(seed);
    let mut evaluator = Evaluator::new(problem, config.constraints);
    let mut state = BfoState::init(&mut evaluator, config, &mut rng)?;
    let mut trace = ConvergenceTrace::new();
    for epoch in 0..config.n_elimination {
        for _ in 0..config.n_reproduction {
            for _ in 0..config.n_chemotactic {
                for i in 0..config.n_bacteria {
                    state.chemotactic_step(i, config, &mut evaluator, &mut rng);
                }
                trace.push(state.best_cost, evaluator.evaluations());
            }
            state.reproduce();
        }
        if epoch + 1 < config.n_elimination {
            state.eliminate_disperse(config.p_ed, &mut evaluator, &mut rng);
        }
    }
    Ok(RunReport::assemble(
        &evaluator,
        &state.best_position,
        trace,
        seed,
        started,
    ))
}
