//! Discrete check of the Hardy inequality `∫u'² ψ^f ≥ (f-1)²/4 ∫x⁻² u² ψ^f`
//! on exact cones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ConeSpace, LinkSpec};
use crate::grid::{GridSpec, RadialGrid};
use crate::par::{self, Execution};
use crate::quadrature::interp_linear;
use crate::solver::assemble;

/// Slack allowed below the sharp constant, in units of `h/L`.
pub const HARDY_SLACK_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyReport {
    pub f: usize,
    pub constant: f64,
    /// Smallest discrete Rayleigh quotient over all grid functions vanishing
    /// at the first and last node.
    pub rayleigh_min: f64,
    /// Ratios to the constant; `None` when the constant is zero.
    pub ratio: Option<f64>,
    pub near_optimizer_ratio: Option<f64>,
    pub probe_min_ratio: Option<f64>,
    pub probes: usize,
    /// `1 - 10 h/L` with `h` the largest step.
    pub floor: f64,
    pub within_slack: bool,
    pub degenerate: bool,
}

struct HardyForms {
    /// Interior nodes `1..N-1`.
    x: Vec<f64>,
    kdiag: Vec<f64>,
    koff: Vec<f64>,
    mass: Vec<f64>,
}

impl HardyForms {
    fn quotient(&self, u: &[f64]) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..u.len() {
            num += self.kdiag[i] * u[i] * u[i];
            if i + 1 < u.len() {
                num += 2.0 * self.koff[i] * u[i] * u[i + 1];
            }
            den += self.mass[i] * u[i] * u[i];
        }
        num / den
    }

    /// Eigenvalues of `K - μ M` below zero (Sylvester inertia of `LDLᵀ`).
    fn count_below(&self, mu: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.x.len() {
            let a = self.kdiag[i] - mu * self.mass[i];
            d = if i == 0 { a } else { a - self.koff[i - 1].powi(2) / d };
            if d == 0.0 {
                d = -f64::EPSILON * a.abs().max(f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn min_eigenvalue(&self, upper: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, upper);
        while self.count_below(hi) == 0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) == 0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

fn hardy_forms(space: &ConeSpace, grid: &RadialGrid) -> Result<HardyForms> {
    let a = assemble(space, grid)?;
    let n = a.len();
    if n < 5 {
        return Err(Error::Parameter("grid too small for a Hardy check".into()));
    }
    // pin the first and last node to zero
    let m = n - 2;
    let mut kdiag = vec![0.0; m];
    for i in 0..m {
        kdiag[i] = a.face_coupling[i] + a.face_coupling[i + 1];
    }
    let koff: Vec<f64> = (0..m - 1).map(|i| -a.face_coupling[i + 1]).collect();
    let x = grid.nodes[1..n - 1].to_vec();
    let mass = (1..n - 1).map(|i| grid.weights[i] / grid.nodes[i].powi(2)).collect();
    Ok(HardyForms { x, kdiag, koff, mass })
}

/// `x^{(1-f)/2} sin(π log(x/a) / T)` on `[a, a e^T]`.
fn near_optimizer(x: &[f64], f: usize, a: f64, t: f64) -> Vec<f64> {
    let e = (1.0 - f as f64) / 2.0;
    x.iter()
        .map(|&xi| {
            let s = (xi / a).ln() / t;
            if (0.0..=1.0).contains(&s) {
                xi.powf(e) * (std::f64::consts::PI * s).sin()
            } else {
                0.0
            }
        })
        .collect()
}

/// Runs the check on the unit-slope cone of length `length` over the round
/// `S^f`. For `f = 1` the constant is zero and only that is reported.
pub fn hardy_check(
    f: usize,
    length: f64,
    spec: &GridSpec,
    probes: usize,
    seed: u64,
    exec: Execution,
) -> Result<HardyReport> {
    if f == 0 {
        return Err(Error::Parameter("link dimension must be positive".into()));
    }
    if f == 1 {
        return Ok(HardyReport {
            f,
            constant: 0.0,
            rayleigh_min: 0.0,
            ratio: None,
            near_optimizer_ratio: None,
            probe_min_ratio: None,
            probes: 0,
            floor: 1.0,
            within_slack: true,
            degenerate: true,
        });
    }
    let space = ConeSpace::exact_cone(LinkSpec::round_sphere(f, 1.0, 1)?, 1.0, length)?;
    let grid = RadialGrid::graded(&space, spec)?;
    hardy_check_on(&space, &grid, probes, seed, exec)
}

/// Runs the check on a given exact cone and grid.
pub fn hardy_check_on(space: &ConeSpace, grid: &RadialGrid, probes: usize, seed: u64, exec: Execution) -> Result<HardyReport> {
    let length = space.length();
    if space.warp.is_exact_cone_on(1e-9 * length, length, 1e-9).is_none() {
        return Err(Error::InvalidSpace("Hardy check needs an exact cone".into()));
    }
    let f = space.f();
    let constant = (f as f64 - 1.0).powi(2) / 4.0;
    let forms = hardy_forms(space, grid)?;
    let floor = 1.0 - HARDY_SLACK_FACTOR * grid.max_step() / length;

    let (x0, x1) = (forms.x[0], forms.x[forms.x.len() - 1]);
    let t_max = (x1 / x0).ln();
    let family: Vec<f64> = (1..=8)
        .map(|k| {
            let t = t_max * (0.6 + 0.05 * k as f64);
            forms.quotient(&near_optimizer(&forms.x, f, x0 * (1.0 + 1e-12), t))
        })
        .collect();
    let near = family.iter().cloned().fold(f64::INFINITY, f64::min);

    let probe_values: Vec<f64> = par::map_range(exec, probes, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let k = rng.gen_range(3..=16);
        let (l0, l1) = (x0.ln(), x1.ln());
        let mut knots: Vec<f64> = (0..k).map(|_| rng.gen_range(l0..l1)).collect();
        knots.push(l0);
        knots.push(l1);
        knots.sort_by(f64::total_cmp);
        let mut vals: Vec<f64> = knots.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
        vals[0] = 0.0;
        *vals.last_mut().unwrap() = 0.0;
        let beta = (1.0 - f as f64) / 2.0 + rng.gen_range(-1.0..1.0);
        let u: Vec<f64> = forms
            .x
            .iter()
            .map(|&xi| xi.powf(beta) * interp_linear(&knots, &vals, xi.ln()))
            .collect();
        forms.quotient(&u)
    });
    let probe_min = probe_values.iter().cloned().filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min);

    let rayleigh_min = forms.min_eigenvalue(near.max(1.0));
    let degenerate = false;
    let to_ratio = |v: f64| Some(v / constant);
    let ratio = to_ratio(rayleigh_min);
    let within_slack = ratio.is_some_and(|r| r >= floor);
    Ok(HardyReport {
        f,
        constant,
        rayleigh_min,
        ratio,
        near_optimizer_ratio: to_ratio(near),
        probe_min_ratio: if probes > 0 { to_ratio(probe_min) } else { None },
        probes,
        floor,
        within_slack,
        degenerate,
    })
}
