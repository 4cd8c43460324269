//! End-to-end solvers.

mod reduction;
mod residual;
mod restricted;
mod uniform;

pub use reduction::{solve, SolveReport};
pub use residual::{residual_instance, RestrictedInstance};
pub use restricted::{check_compliance, solve_restricted, RestrictedOutcome, RestrictedReport};
pub use uniform::solve_uniform;

use crate::error::{Error, Result};
use crate::rounding::GreedyParams;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Accuracy of the fractional optimization.
    pub epsilon: f64,
    /// Sampling slack: items are sampled with probability `(1 - δ)² x_i`.
    pub delta: f64,
    /// Heavy/light threshold; `δ / 4` when unset.
    pub mu: Option<f64>,
    /// Singleton blocks only take items of weight at most `γ W`.
    pub gamma: f64,
    /// Level parameter of the block structure.
    pub n_level: usize,
    /// Largest enumerated prefix set.
    pub xi: usize,
    pub seed: u64,
    pub restarts: usize,
    pub steps: usize,
    pub samples: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 0.05,
            delta: 0.2,
            mu: None,
            gamma: 0.05,
            n_level: 4,
            xi: 2,
            seed: 0,
            restarts: 5,
            steps: 20,
            samples: 200,
        }
    }
}

impl SolverConfig {
    pub fn mu(&self) -> f64 {
        self.mu.unwrap_or(self.delta / 4.0)
    }

    pub fn greedy(&self) -> GreedyParams {
        GreedyParams { steps: self.steps, samples: self.samples }
    }

    pub fn validate(&self) -> Result<()> {
        let open = |v: f64| v > 0.0 && v < 1.0;
        if !open(self.epsilon) || !open(self.delta) || !open(self.gamma) || !open(self.mu()) {
            return Err(Error::Precondition("epsilon, delta, gamma and mu must lie in (0, 1)".into()));
        }
        if self.n_level < 2 {
            return Err(Error::Precondition("n_level must be at least 2".into()));
        }
        Ok(())
    }
}
