//! Seeded random streams.
//!
//! Every optimizer draws through the [`Sampler`] trait so that single steps
//! can be driven by scripted values in tests. [`RngStream`] is the
//! production implementation: ChaCha8 seeded from a `u64` via
//! `SeedableRng::seed_from_u64`, so a seed fixes the whole sequence.

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Scalar;

pub trait Sampler {
    /// Uniform draw on the closed interval `[low, high]`.
    fn uniform<T: Scalar>(&mut self, low: T, high: T) -> T;

    /// Uniform index in `0..n`. `n` must be positive.
    fn index(&mut self, n: usize) -> usize;

    /// Bernoulli trial with success probability `p`.
    fn chance(&mut self, p: f64) -> bool;
}

/// Single-owner random stream for one optimizer run.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    draws: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            draws: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of draws taken so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }
}

impl Sampler for RngStream {
    fn uniform<T: Scalar>(&mut self, low: T, high: T) -> T {
        self.draws += 1;
        if low >= high {
            return low;
        }
        Uniform::new_inclusive(low, high).sample(&mut self.rng)
    }

    fn index(&mut self, n: usize) -> usize {
        self.draws += 1;
        self.rng.gen_range(0..n)
    }

    fn chance(&mut self, p: f64) -> bool {
        self.draws += 1;
        if p <= 0.0 {
            false
        } else if p >= 1.0 {
            true
        } else {
            self.rng.gen_bool(p)
        }
    }
}
