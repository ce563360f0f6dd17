use crate::consts::YamabeConstants;
use crate::error::{Error, Result};
use crate::geometry::{ConeSpace, Tip};
use crate::grid::RadialGrid;
use crate::solver::{assemble, minimize_quotient, SolverConfig};

/// Radial estimate of the Yamabe constant of `B(tip, r)`.
#[derive(Debug, Clone)]
pub struct LocalYamabeEstimate {
    pub tip: Tip,
    pub radius: f64,
    pub p: f64,
    pub value: f64,
    pub cells: usize,
    pub residual: f64,
    pub converged: bool,
    /// Always true: the infimum is taken over radial functions only.
    pub upper_bound: bool,
}

/// Minimizes `Q_p` over radial functions on `B(tip, r)` vanishing at `r`.
pub fn local_yamabe_ball(space: &ConeSpace, tip: Tip, r: f64, p: f64, config: &SolverConfig) -> Result<LocalYamabeEstimate> {
    let length = space.length();
    if !(r > 0.0 && r < 0.5 * length) {
        return Err(Error::Parameter(format!("ball radius must lie in (0, L/2) = (0, {}), got {r}", 0.5 * length)));
    }
    let n = space.constants.dim();
    if !(p > n && p <= 2.0 * n) {
        return Err(Error::Parameter(format!("p must lie in (n, 2n], got {p}")));
    }
    let grid = RadialGrid::graded(space, &config.grid)?;
    let a = assemble(space, &grid)?.restrict_to_ball(tip, r)?;
    if a.len() < 4 {
        return Err(Error::Refused(format!("ball of radius {r} holds only {} grid cells", a.len())));
    }
    let s = YamabeConstants::subcritical_exponent(p);
    let m = minimize_quotient(&a, s, &vec![1.0; a.len()], config)?;
    Ok(LocalYamabeEstimate {
        tip,
        radius: r,
        p,
        value: m.value,
        cells: a.len(),
        residual: m.residual,
        converged: m.converged,
        upper_bound: true,
    })
}

/// Heuristic check of `Y < Y_ℓ` with a relative margin. Both inputs are
/// numerical estimates, so a `true` is evidence rather than proof.
pub fn hypothesis_gate(y: f64, y_local: f64, margin: f64) -> bool {
    if !y.is_finite() || !y_local.is_finite() {
        return false;
    }
    y < y_local - margin.abs() * y_local.abs()
}
