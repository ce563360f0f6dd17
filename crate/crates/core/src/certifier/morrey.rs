//! Scale-weighted `L^q` ball integrals of a potential (Morrey-type bounds).

use serde::Serialize;

use crate::consts::unit_sphere_volume;
use crate::error::{Error, Result};
use crate::geometry::{ConeSpace, Tip};
use crate::grid::RadialGrid;
use crate::quadrature::geomspace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MorreyCenter {
    Tip(Tip),
    /// Interior point at radial position `x`.
    Interior(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MorreyVerdict {
    Finite,
    Infinite,
    /// `α ≥ 2`: the decay is outside the admissible range.
    OutsideHypothesis,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorreySample {
    pub center: MorreyCenter,
    pub radius: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorreyReport {
    pub q: f64,
    pub alpha: f64,
    pub sup_constant: f64,
    /// Log-slope of the per-radius maximum over the smallest decade.
    pub small_radius_slope: f64,
    pub samples: Vec<MorreySample>,
    pub verdict: MorreyVerdict,
}

/// Per-radius maxima may grow this fast toward `r → 0` and still count as
/// bounded (log-slope in `r`).
pub const TREND_TOLERANCE: f64 = 0.05;

/// `count` radii spaced geometrically in `[lo, hi]`.
pub fn log_radii(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    geomspace(lo, hi, count)
}

/// Length of `[a, b] ∩ [c, d]`.
fn overlap(a: f64, b: f64, c: f64, d: f64) -> f64 {
    (b.min(d) - a.max(c)).max(0.0)
}

/// `r^{αq-n} ∫_{B_r} |V|^q dμ`: tip balls integrate over `d < r` with the
/// full measure; interior balls use `ω_n rⁿ` times the mean of `|V|^q` over
/// the geodesic interval `|x - x0| < r`.
fn ball_value(grid: &RadialGrid, vq: &[f64], n: usize, alpha: f64, q: f64, center: MorreyCenter, r: f64) -> Option<f64> {
    let nf = n as f64;
    match center {
        MorreyCenter::Tip(tip) => {
            let (lo, hi) = match tip {
                Tip::Start => (0.0, r),
                Tip::End => (grid.length - r, grid.length),
            };
            let integral: f64 = (0..grid.len())
                .map(|i| {
                    let frac = overlap(grid.faces[i], grid.faces[i + 1], lo, hi) / grid.steps[i];
                    frac * grid.weights[i] * vq[i]
                })
                .sum();
            Some(r.powf(alpha * q - nf) * integral)
        }
        MorreyCenter::Interior(x0) => {
            if r >= x0.min(grid.length - x0) {
                return None;
            }
            let (lo, hi) = (x0 - r, x0 + r);
            let mut acc = 0.0;
            for i in 0..grid.len() {
                acc += overlap(grid.faces[i], grid.faces[i + 1], lo, hi) * vq[i];
            }
            let ball = unit_sphere_volume(n - 1) / nf * r.powf(nf);
            Some(r.powf(alpha * q - nf) * ball * acc / (2.0 * r))
        }
    }
}

pub fn morrey_check(
    space: &ConeSpace,
    grid: &RadialGrid,
    v: &[f64],
    q: f64,
    alpha: f64,
    centers: &[MorreyCenter],
    radii: &[f64],
) -> Result<MorreyReport> {
    if !(q > 1.0) {
        return Err(Error::Parameter(format!("q must exceed 1, got {q}")));
    }
    if !(alpha >= 0.0) {
        return Err(Error::Parameter(format!("alpha must be nonnegative, got {alpha}")));
    }
    if v.len() != grid.len() {
        return Err(Error::Parameter("V must be sampled on the grid".into()));
    }
    if radii.len() < 3 || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Parameter("need at least 3 positive radii".into()));
    }
    let mut radii = radii.to_vec();
    radii.sort_by(f64::total_cmp);
    let (rmin, rmax) = (radii[0], radii[radii.len() - 1]);
    if rmax / rmin < 100.0 * (1.0 - 1e-12) {
        return Err(Error::Refused(format!("radii span [{rmin}, {rmax}] is under two decades")));
    }
    if rmin < grid.faces[1] {
        return Err(Error::Refused(format!("radius {rmin} is below the first cell")));
    }
    let n = space.n();
    let vq: Vec<f64> = v.iter().map(|x| x.abs().powf(q)).collect();
    let mut samples = Vec::new();
    let mut per_radius = Vec::new();
    for &r in &radii {
        let mut best: Option<f64> = None;
        for &c in centers {
            if let Some(value) = ball_value(grid, &vq, n, alpha, q, c, r) {
                samples.push(MorreySample {
                    center: c,
                    radius: r,
                    value,
                });
                best = Some(best.map_or(value, |b: f64| b.max(value)));
            }
        }
        if let Some(b) = best {
            per_radius.push((r, b));
        }
    }
    if per_radius.len() < 3 {
        return Err(Error::Refused("fewer than 3 radii fit inside the space".into()));
    }
    let sup_constant = per_radius.iter().map(|p| p.1).fold(0.0, f64::max);
    // slope of log m(r) against log r over the smallest decade
    let cut = per_radius[0].0 * 10.0;
    let small: Vec<(f64, f64)> = per_radius
        .iter()
        .filter(|(r, _)| *r <= cut * (1.0 + 1e-12))
        .map(|(r, m)| (r.ln(), m.max(f64::MIN_POSITIVE).ln()))
        .collect();
    let small_radius_slope = if small.len() >= 2 {
        let k = small.len() as f64;
        let mx = small.iter().map(|p| p.0).sum::<f64>() / k;
        let my = small.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = small.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = small.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    } else {
        0.0
    };
    let verdict = if alpha >= 2.0 {
        MorreyVerdict::OutsideHypothesis
    } else if small_radius_slope >= -TREND_TOLERANCE && sup_constant.is_finite() {
        MorreyVerdict::Finite
    } else {
        MorreyVerdict::Infinite
    };
    Ok(MorreyReport {
        q,
        alpha,
        sup_constant,
        small_radius_slope,
        samples,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::LinkSpec;
    use crate::grid::GridSpec;
    use approx::assert_relative_eq;

    fn cone() -> (ConeSpace, RadialGrid) {
        let link = LinkSpec::round_sphere(3, 1.0, 4).unwrap();
        let s = ConeSpace::exact_cone(link, 1.0, 1.0).unwrap();
        let g = RadialGrid::graded(&s, &GridSpec::new(3000, 1.02, 1e6)).unwrap();
        (s, g)
    }

    #[test]
    fn inverse_power_potentials() {
        let (s, g) = cone();
        let radii = log_radii(1e-4, 1e-1, 10);
        let centers = [MorreyCenter::Tip(Tip::Start)];
        let pot = |p: i32| g.nodes.iter().map(|x| x.powi(-p)).collect::<Vec<_>>();
        let r0 = morrey_check(&s, &g, &pot(0), 1.5, 0.0, &centers, &radii).unwrap();
        assert_eq!(r0.verdict, MorreyVerdict::Finite);
        // bounded V on a tip ball: Vol(Z)/n
        assert_relative_eq!(r0.sup_constant, s.link.volume / 4.0, max_relative = 5e-3);
        let r1 = morrey_check(&s, &g, &pot(1), 1.5, 1.0, &centers, &radii).unwrap();
        assert_eq!(r1.verdict, MorreyVerdict::Finite);
        assert!(r1.small_radius_slope.abs() < 0.01);
        let wrong = morrey_check(&s, &g, &pot(1), 1.5, 0.5, &centers, &radii).unwrap();
        assert_eq!(wrong.verdict, MorreyVerdict::Infinite);
        let r2 = morrey_check(&s, &g, &pot(2), 1.5, 2.0, &centers, &radii).unwrap();
        assert_eq!(r2.verdict, MorreyVerdict::OutsideHypothesis);
    }

    #[test]
    fn interior_balls_of_bounded_potential() {
        let (s, g) = cone();
        let v = vec![2.0; g.len()];
        let radii = log_radii(1e-3, 0.2, 6);
        let r = morrey_check(&s, &g, &v, 2.0, 0.0, &[MorreyCenter::Interior(0.5)], &radii).unwrap();
        let omega = unit_sphere_volume(3) / 4.0;
        assert_relative_eq!(r.sup_constant, 4.0 * omega, max_relative = 1e-9);
    }

    #[test]
    fn narrow_radii_refused() {
        let (s, g) = cone();
        let v = vec![1.0; g.len()];
        let r = morrey_check(&s, &g, &v, 2.0, 0.0, &[MorreyCenter::Tip(Tip::Start)], &[0.01, 0.02, 0.05]);
        assert!(matches!(r, Err(Error::Refused(_))));
    }
}
