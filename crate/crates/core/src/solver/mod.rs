//! Radial discretization and minimization of the (subcritical) Yamabe
//! functional.

mod assemble;
mod continuation;
mod local;
mod minimize;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

pub use assemble::{assemble, Assembled};
pub(crate) use assemble::solve_tridiagonal;
pub use continuation::{continuation, continuation_from, extrapolate_to_zero, ContinuationResult, StageFailure};
pub use local::{hypothesis_gate, local_yamabe_ball, LocalYamabeEstimate};
pub use minimize::{
    minimize_quotient, minimize_subcritical, minimize_subcritical_from, residual, QuotientMinimum, SubcriticalSolution,
};

/// Numerical settings shared by the minimizer and the continuation driver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub grid: GridSpec,
    /// Weighted `L²` tolerance on the Euler-Lagrange residual.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Sufficient-decrease constant of the Armijo rule.
    pub armijo: f64,
    /// Exponents `p`, strictly decreasing toward `n`. Empty selects
    /// `n + 2^-k`, `k = 0..=6`.
    pub schedule: Vec<f64>,
    /// Polynomial degree in `p - n` used to extrapolate `Y_p` to `p = n`.
    pub extrapolation_order: usize,
    /// Quotient values below this are treated as divergence to `-inf`.
    pub unbounded_floor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            tolerance: 1e-8,
            max_iterations: 20_000,
            armijo: 1e-4,
            schedule: Vec::new(),
            extrapolation_order: 1,
            unbounded_floor: -1e12,
        }
    }
}

impl SolverConfig {
    pub fn with_grid(grid: GridSpec) -> Self {
        Self {
            grid,
            ..Self::default()
        }
    }

    pub fn default_schedule(n: usize) -> Vec<f64> {
        (0..=6).map(|k| n as f64 + 0.5f64.powi(k)).collect()
    }

    /// The schedule for dimension `n`, validated.
    pub fn schedule_for(&self, n: usize) -> Result<Vec<f64>> {
        let schedule = if self.schedule.is_empty() {
            Self::default_schedule(n)
        } else {
            self.schedule.clone()
        };
        let nf = n as f64;
        if schedule.iter().any(|&p| !(p > nf) || p > 2.0 * nf) {
            return Err(Error::Parameter(format!("schedule entries must lie in (n, 2n] = ({n}, {}]", 2 * n)));
        }
        if schedule.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Parameter("schedule must be strictly decreasing".into()));
        }
        Ok(schedule)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if !(self.tolerance > 0.0) {
            return Err(Error::Parameter("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Parameter("max_iterations must be positive".into()));
        }
        if !(self.armijo > 0.0 && self.armijo < 0.5) {
            return Err(Error::Parameter("armijo constant must lie in (0, 0.5)".into()));
        }
        Ok(())
    }
}
