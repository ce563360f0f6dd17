//! Seeded random probe families on a radial grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::RadialGrid;

/// Random piecewise-linear function with 2 to 12 interior knots.
pub fn piecewise_linear<R: Rng>(rng: &mut R, grid: &RadialGrid) -> Vec<f64> {
    let k = rng.gen_range(2..=12);
    let mut knots: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..grid.length)).collect();
    knots.push(0.0);
    knots.push(grid.length);
    knots.sort_by(f64::total_cmp);
    let vals: Vec<f64> = knots.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    grid.nodes
        .iter()
        .map(|&x| crate::quadrature::interp_linear(&knots, &vals, x))
        .collect()
}

/// `d^β (1 - d/r)_+²` at a random end of the interval, `d` the distance to
/// that end, with `β` above `-(n-2)/2` so the energy stays finite.
pub fn tip_power_bump<R: Rng>(rng: &mut R, grid: &RadialGrid, n: usize) -> Vec<f64> {
    let beta = rng.gen_range(-(n as f64 - 2.0) / 2.0 + 0.05..2.0);
    let lo = (10.0 * grid.min_step()).ln();
    let hi = (0.5 * grid.length).ln();
    let r = rng.gen_range(lo.min(hi)..hi).exp();
    let from_start = rng.gen_bool(0.5);
    grid.nodes
        .iter()
        .map(|&x| {
            let d = if from_start { x } else { grid.length - x };
            if d < r {
                d.powf(beta) * (1.0 - d / r).powi(2)
            } else {
                0.0
            }
        })
        .collect()
}

/// Bubble `(ε / (ε² + (x - x0)²))^{(n-2)/2}` centred at a random point.
pub fn bubble<R: Rng>(rng: &mut R, grid: &RadialGrid, n: usize) -> Vec<f64> {
    let x0 = rng.gen_range(0.0..grid.length);
    let eps = rng.gen_range((10.0 * grid.min_step()).ln().min(-1.0)..(0.5 * grid.length).ln()).exp();
    let e = (n as f64 - 2.0) / 2.0;
    grid.nodes
        .iter()
        .map(|&x| (eps / (eps * eps + (x - x0).powi(2))).powf(e))
        .collect()
}

/// Probe `index` of the family seeded by `seed`. Each probe has its own
/// stream, so families can be evaluated in any order or in parallel.
pub fn probe(seed: u64, index: usize, grid: &RadialGrid, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    match index % 3 {
        0 => piecewise_linear(&mut rng, grid),
        1 => tip_power_bump(&mut rng, grid, n),
        _ => bubble(&mut rng, grid, n),
    }
}
