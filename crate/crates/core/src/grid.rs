//! Cell-centered radial grids graded geometrically toward the conic tips.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConeSpace, Tip};

/// Parameters of a graded grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Total number of cells (= nodes).
    pub cells: usize,
    /// Growth factor between neighbouring cells in the graded layers.
    pub ratio: f64,
    /// Ratio of the bulk cell size to the size of the cell touching a tip.
    pub depth: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            cells: 1000,
            ratio: 1.1,
            depth: 1e3,
        }
    }
}

impl GridSpec {
    pub fn new(cells: usize, ratio: f64, depth: f64) -> Self {
        Self { cells, ratio, depth }
    }

    pub fn uniform(cells: usize) -> Self {
        Self {
            cells,
            ratio: 1.0,
            depth: 1.0,
        }
    }

    /// Halves every cell: twice the cells, square-rooted growth factor.
    pub fn refined(&self) -> Self {
        Self {
            cells: 2 * self.cells,
            ratio: self.ratio.sqrt(),
            depth: self.depth,
        }
    }

    /// Cells in each graded layer.
    pub fn layer_cells(&self) -> usize {
        if self.ratio <= 1.0 || self.depth <= 1.0 {
            0
        } else {
            (self.depth.ln() / self.ratio.ln()).round() as usize
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1.0..=1.2).contains(&self.ratio) {
            return Err(Error::Parameter(format!("grading ratio must lie in [1, 1.2], got {}", self.ratio)));
        }
        if !(self.depth >= 1.0) || !self.depth.is_finite() {
            return Err(Error::Parameter(format!("grading depth must be >= 1, got {}", self.depth)));
        }
        if self.cells < 8 {
            return Err(Error::Parameter(format!("grid needs at least 8 cells, got {}", self.cells)));
        }
        Ok(())
    }
}

/// Radial grid on `(0, L)` with quadrature weights for `dV_g`.
///
/// Cells `[X_k, X_{k+1}]` tile `[0, L]`; nodes sit at cell centers so no node
/// touches a tip. The weight of node `i` is `Vol(Z) ψ(x_i)^f (X_{i+1} - X_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub faces: Vec<f64>,
    pub nodes: Vec<f64>,
    pub steps: Vec<f64>,
    pub weights: Vec<f64>,
    pub length: f64,
}

impl RadialGrid {
    /// Grid graded toward every tip of `space`.
    pub fn graded(space: &ConeSpace, spec: &GridSpec) -> Result<Self> {
        spec.validate()?;
        let tips = space.warp.tips();
        let k = spec.layer_cells();
        let layers = tips.len() * k;
        if spec.cells < layers + 4 {
            return Err(Error::Parameter(format!(
                "{} cells cannot hold {} graded cells per tip plus a bulk",
                spec.cells, k
            )));
        }
        let bulk = spec.cells - layers;
        let layer: Vec<f64> = (1..=k).rev().map(|j| spec.ratio.powi(-(j as i32))).collect();
        let mut rel = Vec::with_capacity(spec.cells);
        if tips.contains(&Tip::Start) {
            rel.extend_from_slice(&layer);
        }
        rel.extend(std::iter::repeat(1.0).take(bulk));
        if tips.contains(&Tip::End) {
            rel.extend(layer.iter().rev());
        }
        let length = space.length();
        let total: f64 = rel.iter().sum();
        let steps: Vec<f64> = rel.iter().map(|r| r * length / total).collect();
        Self::from_steps(space, steps)
    }

    /// Grid from cell widths summing to `L`.
    pub fn from_steps(space: &ConeSpace, steps: Vec<f64>) -> Result<Self> {
        let length = space.length();
        let mut faces = Vec::with_capacity(steps.len() + 1);
        let mut acc = 0.0;
        faces.push(0.0);
        for h in &steps {
            acc += h;
            faces.push(acc);
        }
        *faces.last_mut().unwrap() = length;
        Self::from_faces(space, faces)
    }

    /// Grid from cell faces `0 = X_0 < ... < X_N = L`.
    pub fn from_faces(space: &ConeSpace, faces: Vec<f64>) -> Result<Self> {
        let length = space.length();
        if faces.len() < 3 || faces[0] != 0.0 || (faces[faces.len() - 1] - length).abs() > 1e-12 * length {
            return Err(Error::Parameter("faces must run from 0 to L".into()));
        }
        if faces.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parameter("faces must be strictly increasing".into()));
        }
        let steps: Vec<f64> = faces.windows(2).map(|w| w[1] - w[0]).collect();
        let nodes: Vec<f64> = faces.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let f = space.f() as i32;
        let vol = space.link.volume;
        let mut weights = Vec::with_capacity(nodes.len());
        for (x, h) in nodes.iter().zip(&steps) {
            let psi = space.warp.psi(*x);
            if !(psi > 0.0) {
                return Err(Error::InvalidSpace(format!("warp is not positive at node x = {x}")));
            }
            weights.push(vol * psi.powi(f) * h);
        }
        Ok(Self {
            faces,
            nodes,
            steps,
            weights,
            length,
        })
    }

    /// Rebuilds the cell-centered grid whose nodes are `nodes`.
    pub fn from_nodes(space: &ConeSpace, nodes: &[f64]) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::Parameter("need at least 3 nodes".into()));
        }
        // nodes are cell midpoints: walk inward from both ends and meet in the middle
        let n = nodes.len();
        let length = space.length();
        let mut faces = vec![0.0; n + 1];
        faces[n] = length;
        let mid = n / 2;
        for k in 0..mid {
            faces[k + 1] = 2.0 * nodes[k] - faces[k];
        }
        for k in (mid + 1..=n - 1).rev() {
            faces[k] = 2.0 * nodes[k] - faces[k + 1];
        }
        Self::from_faces(space, faces)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn min_step(&self) -> f64 {
        self.steps.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_step(&self) -> f64 {
        self.steps.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_grading(&self) -> f64 {
        self.steps
            .windows(2)
            .map(|w| (w[1] / w[0]).max(w[0] / w[1]))
            .fold(1.0, f64::max)
    }

    /// Discrete volume `Σ w_i`.
    pub fn volume(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Discrete `L^s` norm with the solver's quadrature.
    pub fn norm(&self, u: &[f64], s: f64) -> f64 {
        let sum: f64 = self.weights.iter().zip(u).map(|(w, v)| w * v.abs().powf(s)).sum();
        sum.powf(1.0 / s)
    }
}

/// Values of a radial function at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFunction(pub Vec<f64>);

impl DiscreteFunction {
    pub fn constant(len: usize, value: f64) -> Self {
        Self(vec![value; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl From<Vec<f64>> for DiscreteFunction {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consts::unit_sphere_volume;
    use approx::assert_relative_eq;

    #[test]
    fn graded_grid_invariants() {
        let s = ConeSpace::round_spindle(4, 0.5, 3.0).unwrap();
        let g = RadialGrid::graded(&s, &GridSpec::new(600, 1.1, 1e3)).unwrap();
        assert_eq!(g.len(), 600);
        assert!(g.nodes.windows(2).all(|w| w[1] > w[0]));
        assert!(g.weights.iter().all(|&w| w > 0.0));
        assert!(g.max_grading() <= 1.1 + 1e-9);
        assert_relative_eq!(g.max_step() / g.min_step(), 1.1f64.powi(72), max_relative = 1e-9);
        assert_relative_eq!(g.faces[600], 3.0);
    }

    #[test]
    fn cone_is_graded_at_one_end_only() {
        let link = crate::geometry::LinkSpec::round_sphere(2, 1.0, 4).unwrap();
        let s = ConeSpace::exact_cone(link, 1.0, 1.0).unwrap();
        let g = RadialGrid::graded(&s, &GridSpec::new(300, 1.1, 100.0)).unwrap();
        assert!(g.steps[0] < g.steps[299] / 50.0);
    }

    #[test]
    fn volume_converges_at_second_order() {
        let s = ConeSpace::round_sphere(4).unwrap();
        let exact = unit_sphere_volume(4);
        let mut spec = GridSpec::new(200, 1.1, 100.0);
        let mut errs = vec![];
        for _ in 0..3 {
            let g = RadialGrid::graded(&s, &spec).unwrap();
            errs.push((g.volume() - exact).abs());
            spec = spec.refined();
        }
        let r1 = (errs[0] / errs[1]).log2();
        let r2 = (errs[1] / errs[2]).log2();
        assert!(r1 > 1.8 && r2 > 1.8, "{r1} {r2}");
    }

    #[test]
    fn nodes_round_trip() {
        let s = ConeSpace::round_spindle(4, 0.8, 3.0).unwrap();
        let g = RadialGrid::graded(&s, &GridSpec::new(400, 1.15, 1e4)).unwrap();
        let back = RadialGrid::from_nodes(&s, &g.nodes).unwrap();
        for (a, b) in g.weights.iter().zip(&back.weights) {
            assert_relative_eq!(a, b, max_relative = 1e-6);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let s = ConeSpace::round_sphere(3).unwrap();
        assert!(RadialGrid::graded(&s, &GridSpec::new(100, 1.5, 10.0)).is_err());
        assert!(RadialGrid::graded(&s, &GridSpec::new(50, 1.01, 1e6)).is_err());
    }
}
