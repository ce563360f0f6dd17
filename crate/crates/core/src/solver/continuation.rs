use crate::error::{Error, Result};
use crate::solver::{minimize_subcritical_from, Assembled, SolverConfig, SubcriticalSolution};

/// A stage that did not converge.
#[derive(Debug)]
pub struct StageFailure {
    pub p: f64,
    pub error: Error,
}

/// Stages of `p → n` continuation and the extrapolated `Y` at `p = n`.
#[derive(Debug)]
pub struct ContinuationResult {
    pub n: usize,
    pub stages: Vec<SubcriticalSolution>,
    /// `None` when fewer stages converged than the extrapolation needs.
    pub extrapolated: Option<f64>,
    pub failure: Option<StageFailure>,
}

impl ContinuationResult {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    pub fn last(&self) -> Option<&SubcriticalSolution> {
        self.stages.last()
    }
}

/// Value at `e = 0` of the degree-`order` polynomial through the last
/// `order + 1` points `(e_i, y_i)` (Neville's scheme).
pub fn extrapolate_to_zero(e: &[f64], y: &[f64], order: usize) -> Option<f64> {
    let k = order + 1;
    if e.len() != y.len() || e.len() < k {
        return None;
    }
    let e = &e[e.len() - k..];
    let mut t = y[y.len() - k..].to_vec();
    for m in 1..k {
        for i in 0..k - m {
            t[i] = (e[i + m] * t[i] - e[i] * t[i + 1]) / (e[i + m] - e[i]);
        }
    }
    Some(t[0])
}

/// Runs the schedule from `u ≡ 1`, warm-starting each stage from the last.
pub fn continuation(a: &Assembled, config: &SolverConfig) -> Result<ContinuationResult> {
    continuation_from(a, config, &vec![1.0; a.len()])
}

pub fn continuation_from(a: &Assembled, config: &SolverConfig, init: &[f64]) -> Result<ContinuationResult> {
    config.validate()?;
    let n = a.constants.n;
    let schedule = config.schedule_for(n)?;
    let mut stages: Vec<SubcriticalSolution> = Vec::with_capacity(schedule.len());
    let mut failure = None;
    for &p in &schedule {
        let start = stages.last().map_or(init, |s| s.u.values());
        match minimize_subcritical_from(a, p, config, start) {
            Ok(sol) => {
                log::info!(
                    "stage p = {p}: Y_p = {:.10e}, residual {:.2e}, {} iterations",
                    sol.y_p,
                    sol.residual,
                    sol.iterations
                );
                stages.push(sol);
            }
            Err(error) if error.is_numerical() => {
                log::error!("stage p = {p} failed: {error}");
                failure = Some(StageFailure { p, error });
                break;
            }
            Err(error) => return Err(error),
        }
    }
    let e: Vec<f64> = stages.iter().map(|s| s.p - n as f64).collect();
    let y: Vec<f64> = stages.iter().map(|s| s.y_p).collect();
    let extrapolated = if failure.is_none() {
        extrapolate_to_zero(&e, &y, config.extrapolation_order)
    } else {
        None
    };
    Ok(ContinuationResult {
        n,
        stages,
        extrapolated,
        failure,
    })
}
