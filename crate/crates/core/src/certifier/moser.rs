//! Moser iteration ladder and the resulting sup bound.

use serde::Serialize;

use crate::certifier::SobolevEstimate;
use crate::consts::YamabeConstants;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;

/// Levels of the ladder that are evaluated explicitly.
pub const DEFAULT_LEVELS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoserLadder {
    pub q: f64,
    pub r: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub v_norm_q: f64,
    pub c: f64,
    pub c1: f64,
    /// `‖u‖_{κ^j α r}` for `j = 0..levels`.
    pub norms: Vec<f64>,
    /// Partial products `∏_{i<j} (C₁ κ^i α)^{1/(2κ^i)}` for `j = 0..levels`.
    pub partial_products: Vec<f64>,
    /// `log` of the full infinite product.
    pub log_product: f64,
    pub sup_bound: f64,
    pub discrete_max: f64,
    /// `norms[j] ≤ partial_products[j] ‖u‖_{αr}` at every level.
    pub ladder_consistent: bool,
    /// Bound is finite and at least the grid maximum of `u`.
    pub validated: bool,
}

/// `max(u) (Σ w (u/max)^s)^{1/s}`, stable for large `s`.
fn scaled_norm(grid: &RadialGrid, u: &[f64], s: f64) -> f64 {
    let m = u.iter().cloned().fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    let sum: f64 = grid.weights.iter().zip(u).map(|(w, v)| w * (v / m).powf(s)).sum();
    m * sum.powf(1.0 / s)
}

/// Sup bound for a nonnegative `u` with `-Δu ≤ V u` (weakly) from the ladder
/// `‖u‖_{κ^{j+1} α r} ≤ (C₁ κ^j α)^{1/(2κ^j)} ‖u‖_{κ^j α r}`.
///
/// `α = (1 + κ)/2`, which keeps `α r` below the critical exponent.
pub fn moser_supbound(
    u: &[f64],
    v: &[f64],
    q: f64,
    estimate: &SobolevEstimate,
    grid: &RadialGrid,
    consts: &YamabeConstants,
    levels: usize,
) -> Result<MoserLadder> {
    let n = consts.dim();
    if !(q > n / 2.0) {
        return Err(Error::Hypothesis(format!("Moser iteration needs q > n/2 = {}, got {q}", n / 2.0)));
    }
    if u.len() != grid.len() || v.len() != grid.len() {
        return Err(Error::Parameter("u and V must be sampled on the grid".into()));
    }
    if u.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(Error::Parameter("u must be finite and nonnegative".into()));
    }
    let r = 2.0 * q / (q - 1.0);
    let kappa = n * (q - 1.0) / ((n - 2.0) * q);
    let alpha = 0.5 * (1.0 + kappa);
    let v_norm_q = grid.norm(v, q);
    let c = estimate.a * v_norm_q + estimate.b * grid.volume().powf(1.0 / q);
    let c1 = c * alpha / (2.0 * alpha - 1.0);

    let base = scaled_norm(grid, u, alpha * r);
    let mut norms = Vec::with_capacity(levels);
    let mut partial_products = Vec::with_capacity(levels);
    let mut log_partial: f64 = 0.0;
    for j in 0..levels {
        let kj = kappa.powi(j as i32);
        norms.push(scaled_norm(grid, u, kj * alpha * r));
        partial_products.push(log_partial.exp());
        log_partial += (c1 * kj * alpha).ln() / (2.0 * kj);
    }
    // Σ_j [ln(C₁α) + j ln κ] / (2κ^j) in closed form with x = 1/κ
    let x = 1.0 / kappa;
    let log_product = (c1 * alpha).ln() / (2.0 * (1.0 - x)) + kappa.ln() * x / (2.0 * (1.0 - x).powi(2));
    let sup_bound = log_product.exp() * base;
    let discrete_max = u.iter().cloned().fold(0.0, f64::max);
    let ladder_consistent = norms
        .iter()
        .zip(&partial_products)
        .all(|(nj, pj)| *nj <= pj * base * (1.0 + 1e-12));
    let validated = sup_bound.is_finite() && sup_bound >= discrete_max;
    Ok(MoserLadder {
        q,
        r,
        kappa,
        alpha,
        v_norm_q,
        c,
        c1,
        norms,
        partial_products,
        log_product,
        sup_bound,
        discrete_max,
        ladder_consistent,
        validated,
    })
}
