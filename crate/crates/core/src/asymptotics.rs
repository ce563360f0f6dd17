//! Tip asymptotics of computed solutions: fitted exponents, comparison with
//! the indicial prediction, and positivity audits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    admissibility_with_tol, conic_coefficients, default_window as curvature_window, normalize_tip, Admissibility,
    ConeSpace, StratumData, Tip,
};
use crate::spectrum::predicted_tip_exponent;
use crate::grid::RadialGrid;
use crate::quadrature::{geomspace, interp_linear};

/// Fits below this `|γ̂|` are treated as having a constant leading term.
pub const CONSTANT_LEADING_THRESHOLD: f64 = 0.05;
/// Default acceptance threshold of [`compare_prediction`].
pub const DEFAULT_MATCH_THRESHOLD: f64 = 0.05;
/// Exponents are compared on the scale `max(|a|, |b|, EXPONENT_SCALE_FLOOR)`.
pub const EXPONENT_SCALE_FLOOR: f64 = 0.05;

const RESAMPLE_POINTS: usize = 48;

/// `u ≈ c0 d^γ̂` near a tip, with `d` the distance to the tip.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionFit {
    pub tip: Tip,
    pub gamma_hat: f64,
    pub c0_hat: f64,
    /// Window in distance from the tip.
    pub window: (f64, f64),
    /// `max |c0 d^γ̂ / u - 1|` over the resampled window.
    pub fit_error: f64,
    /// Next exponent `s` in `u ≈ c0 + c1 d^s`, fitted when `|γ̂|` is small.
    pub secondary_exponent: Option<f64>,
}

/// `[4h, min(0.1 L, 64h)]` with `h` the cell touching the tip.
pub fn default_window(grid: &RadialGrid, tip: Tip) -> (f64, f64) {
    let h = match tip {
        Tip::Start => grid.steps[0],
        Tip::End => grid.steps[grid.len() - 1],
    };
    (4.0 * h, (0.1 * grid.length).min(64.0 * h))
}

/// Two-stage fit of the leading behaviour of `u` at `tip`.
///
/// Stage one regresses `log u` on `log d` over log-spaced samples of the
/// window. If `|γ̂| < 0.05`, stage two fits `c0 + c1 d^s` by variable
/// projection over `s` and reports `s` as the secondary exponent.
pub fn fit_exponent(u: &[f64], grid: &RadialGrid, tip: Tip, window: Option<(f64, f64)>) -> Result<ExpansionFit> {
    if u.len() != grid.len() {
        return Err(Error::Parameter(format!("{} values on a grid of {} nodes", u.len(), grid.len())));
    }
    let (lo, hi) = window.unwrap_or_else(|| default_window(grid, tip));
    if !(lo > 0.0 && hi >= 4.0 * lo) {
        return Err(Error::Parameter(format!("window [{lo}, {hi}] must span a factor of at least 4")));
    }
    let mut pts: Vec<(f64, f64)> = grid
        .nodes
        .iter()
        .zip(u)
        .map(|(&x, &v)| (tip.distance(x, grid.length), v))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let d: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let v: Vec<f64> = pts.iter().map(|p| p.1).collect();
    if lo < d[0] || hi > d[d.len() - 1] {
        return Err(Error::Parameter(format!(
            "window [{lo}, {hi}] leaves the sampled range [{}, {}]",
            d[0],
            d[d.len() - 1]
        )));
    }
    // nodes bracketing the window must keep one sign
    let first = d.partition_point(|&t| t < lo).saturating_sub(1);
    let last = d.partition_point(|&t| t <= hi).min(d.len() - 1);
    let slice = &v[first..=last];
    if slice.iter().any(|&x| !(x > 0.0)) {
        if slice.iter().any(|&x| x > 0.0) && slice.iter().any(|&x| x < 0.0) {
            return Err(Error::Refused("solution changes sign in the fit window".into()));
        }
        return Err(Error::Refused("solution is not positive in the fit window".into()));
    }

    let logd: Vec<f64> = d[first..=last].iter().map(|t| t.ln()).collect();
    let logv: Vec<f64> = slice.iter().map(|t| t.ln()).collect();
    let xs: Vec<f64> = geomspace(lo, hi, RESAMPLE_POINTS).iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| interp_linear(&logd, &logv, x)).collect();
    let (b0, gamma) = linear_fit(&xs, &ys);
    let c0 = b0.exp();
    let fit_error = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| ((b0 + gamma * x - y).exp() - 1.0).abs())
        .fold(0.0, f64::max);
    let secondary_exponent = if gamma.abs() < CONSTANT_LEADING_THRESHOLD {
        let ds: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
        let us: Vec<f64> = ys.iter().map(|y| y.exp()).collect();
        constant_plus_power(&ds, &us)
    } else {
        None
    };
    Ok(ExpansionFit {
        tip,
        gamma_hat: gamma,
        c0_hat: c0,
        window: (lo, hi),
        fit_error,
        secondary_exponent,
    })
}

/// Least-squares line `y ≈ b0 + b1 x`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let b1 = sxy / sxx;
    (my - b1 * mx, b1)
}

fn projected_residual(d: &[f64], u: &[f64], s: f64) -> f64 {
    let z: Vec<f64> = d.iter().map(|t| t.powf(s)).collect();
    let (b0, b1) = linear_fit(&z, u);
    z.iter().zip(u).map(|(zi, ui)| (b0 + b1 * zi - ui).powi(2)).sum()
}

/// Exponent `s ∈ [0.05, 6]` of the best fit `u ≈ c0 + c1 d^s`.
fn constant_plus_power(d: &[f64], u: &[f64]) -> Option<f64> {
    let spread = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - u.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = u.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if !(spread > 1e-13 * scale) {
        return None;
    }
    // normalize distances so d^s stays representable over the whole range
    let dmax = d[d.len() - 1];
    let d: Vec<f64> = d.iter().map(|t| t / dmax).collect();
    let grid: Vec<f64> = (0..=119).map(|k| 0.05 + 0.05 * k as f64).collect();
    let best = grid
        .iter()
        .copied()
        .min_by(|a, b| projected_residual(&d, u, *a).total_cmp(&projected_residual(&d, u, *b)))?;
    let (mut a, mut b) = ((best - 0.05).max(0.01), best + 0.05);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - phi * (b - a);
        let e = a + phi * (b - a);
        if projected_residual(&d, u, c) < projected_residual(&d, u, e) {
            b = e;
        } else {
            a = c;
        }
    }
    Some(0.5 * (a + b))
}

/// Symmetric relative deviation on the scale `max(|a|, |b|, 0.05)`.
pub fn exponent_deviation(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(EXPONENT_SCALE_FLOOR)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionReport {
    pub gamma_hat: f64,
    pub predicted: f64,
    pub rel_dev: f64,
    pub threshold: f64,
    #[serde(rename = "match")]
    pub matches: bool,
}

pub fn compare_prediction(fit: &ExpansionFit, predicted: f64, threshold: Option<f64>) -> PredictionReport {
    let threshold = threshold.unwrap_or(DEFAULT_MATCH_THRESHOLD);
    let rel_dev = exponent_deviation(fit.gamma_hat, predicted);
    PredictionReport {
        gamma_hat: fit.gamma_hat,
        predicted,
        rel_dev,
        threshold,
        matches: rel_dev <= threshold,
    }
}

/// Whether the fit is consistent with `u < C d^{-(n-2)/2 + ε}`, the growth
/// bound assumed by the tip regularity statement. Checked a posteriori only.
pub fn growth_condition_holds(fit: &ExpansionFit, n: usize) -> bool {
    fit.gamma_hat > -(n as f64 - 2.0) / 2.0
}

/// Curvature data `(A0, A1)` of every tip, fitted on `[2h, 20h]`.
pub fn tip_strata(space: &ConeSpace, min_step: f64) -> Result<Vec<StratumData>> {
    space
        .warp
        .tips()
        .into_iter()
        .map(|tip| {
            let e = conic_coefficients(space, tip, curvature_window(min_step))?;
            StratumData::new(space.n(), space.f(), e.a0, e.a1)
        })
        .collect()
}

/// Admissibility of a space from its tips; coefficients below `1e-6`
/// relative to `f(f-1)` count as zero.
pub fn space_admissibility(space: &ConeSpace, min_step: f64) -> Result<(Vec<StratumData>, Admissibility)> {
    let strata = tip_strata(space, min_step)?;
    let f = space.f() as f64;
    let tol = 1e-6 * (f * (f - 1.0)).max(1.0);
    let adm = admissibility_with_tol(&strata, tol);
    Ok((strata, adm))
}

/// `(δ - 1)(n - 2)/2` at `tip` with `δ` from the tip normalization.
pub fn predicted_exponent(space: &ConeSpace, tip: Tip) -> Result<f64> {
    let norm = normalize_tip(space, tip)?;
    Ok(predicted_tip_exponent(norm.delta, &space.constants))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityAudit {
    pub min: f64,
    pub max: f64,
    /// A positive lower bound is asserted only under iv_a or iv_b.
    pub lower_bound_asserted: bool,
    /// False when a lower bound is asserted but the grid minimum is not
    /// positive.
    pub consistent: bool,
    pub note: String,
}

pub fn positivity_audit(u: &[f64], admissibility: &Admissibility) -> PositivityAudit {
    let min = u.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let asserted = admissibility.positivity_guaranteed();
    let note = if asserted {
        if min > 0.0 {
            "positive lower bound expected and observed".to_string()
        } else {
            "positive lower bound expected but grid minimum is not positive".to_string()
        }
    } else if admissibility.iv_c {
        "only iv_c holds: vanishing at a tip is permitted, no lower bound asserted".to_string()
    } else {
        "no curvature condition holds: no lower bound asserted".to_string()
    };
    PositivityAudit {
        min,
        max,
        lower_bound_asserted: asserted,
        consistent: !asserted || min > 0.0,
        note,
    }
}
