use crate::error::{Error, Result};
use crate::geometry::space::ConeSpace;
use crate::geometry::warp::{Tip, WarpProfile};
use crate::quadrature::geomspace;

/// Minimum number of samples in a fit window.
pub const MIN_FIT_SAMPLES: usize = 8;
/// Samples used on analytic warps.
const ANALYTIC_SAMPLES: usize = 33;

/// `scal = A0/x² + A1/x + O(1)` at a tip, fitted on a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureExpansion {
    pub a0: f64,
    pub a1: f64,
    /// Fitted coefficient of the bounded part.
    pub a2: f64,
    /// `sup |scal - A0/x² - A1/x|` over the window samples.
    pub remainder_bound: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Default fit window `[2h, 20h]` for a grid with smallest step `h`.
pub fn default_window(min_step: f64) -> (f64, f64) {
    (2.0 * min_step, 20.0 * min_step)
}

/// Least-squares fit of `x² scal` against `1, x, x²` on `window`, where `x` is
/// the distance to `tip`.
pub fn conic_coefficients(space: &ConeSpace, tip: Tip, window: (f64, f64)) -> Result<CurvatureExpansion> {
    let (lo, hi) = window;
    let l = space.length();
    if !(lo > 0.0 && hi > lo && hi < l) {
        return Err(Error::Domain(format!("fit window ({lo}, {hi}) must lie inside (0, {l})")));
    }
    let dists: Vec<f64> = match &space.warp {
        WarpProfile::Sampled(s) => {
            let mut d: Vec<f64> = s
                .x
                .iter()
                .map(|&x| tip.distance(x, l))
                .filter(|&d| d >= lo && d <= hi)
                .collect();
            d.sort_by(f64::total_cmp);
            d
        }
        _ => geomspace(lo, hi, ANALYTIC_SAMPLES),
    };
    if dists.len() < MIN_FIT_SAMPLES {
        return Err(Error::IllConditioned(format!(
            "window holds {} samples, need at least {MIN_FIT_SAMPLES}",
            dists.len()
        )));
    }
    let mut ys = Vec::with_capacity(dists.len());
    for &d in &dists {
        ys.push(d * d * space.scal_at(tip.point(d, l))?);
    }
    let ts: Vec<f64> = dists.iter().map(|d| d / hi).collect();
    let c = least_squares_quadratic(&ts, &ys)?;
    let (a0, a1, a2) = (c[0], c[1] / hi, c[2] / (hi * hi));
    let remainder_bound = dists
        .iter()
        .zip(&ys)
        .map(|(&d, &y)| ((y - a0 - a1 * d) / (d * d)).abs())
        .fold(0.0, f64::max);
    Ok(CurvatureExpansion {
        a0,
        a1,
        a2,
        remainder_bound,
        window,
        samples: dists.len(),
    })
}

/// Fits `y ≈ c0 + c1 t + c2 t²` by Householder-free modified Gram–Schmidt QR.
fn least_squares_quadratic(ts: &[f64], ys: &[f64]) -> Result<[f64; 3]> {
    let m = ts.len();
    let mut q: Vec<Vec<f64>> = vec![vec![1.0; m], ts.to_vec(), ts.iter().map(|t| t * t).collect()];
    let mut r = [[0.0f64; 3]; 3];
    let norms: Vec<f64> = q.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    for j in 0..3 {
        for i in 0..j {
            let dot: f64 = q[i].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            r[i][j] = dot;
            let qi = q[i].clone();
            for (v, a) in q[j].iter_mut().zip(&qi) {
                *v -= dot * a;
            }
        }
        let nrm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if nrm <= 1e-9 * norms[j] {
            return Err(Error::IllConditioned(format!(
                "fit window too narrow to separate the x^{j} term (relative pivot {:.1e})",
                nrm / norms[j]
            )));
        }
        r[j][j] = nrm;
        q[j].iter_mut().for_each(|v| *v /= nrm);
    }
    let qty: Vec<f64> = (0..3).map(|i| q[i].iter().zip(ys).map(|(a, b)| a * b).sum()).collect();
    let mut c = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|k| r[i][k] * c[k]).sum();
        c[i] = (qty[i] - s) / r[i][i];
    }
    Ok(c)
}
