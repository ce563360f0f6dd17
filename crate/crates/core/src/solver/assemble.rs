use crate::consts::YamabeConstants;
use crate::error::{Error, Result};
use crate::geometry::{scal_profile, ConeSpace, Tip};
use crate::grid::RadialGrid;

/// Discrete quadratic forms of the radial Yamabe functional.
///
/// The Dirichlet energy is a finite-volume sum over interior cell faces,
/// `Σ Vol(Z) ψ(X_k)^f (u_k - u_{k-1})² / (x_k - x_{k-1})`. No flux crosses the
/// outer faces: at a tip `ψ = 0`, and at a cone boundary the condition is
/// natural.
#[derive(Debug, Clone)]
pub struct Assembled {
    pub grid: RadialGrid,
    pub constants: YamabeConstants,
    /// Coupling of nodes `k-1` and `k` across face `k`, length `len - 1`.
    pub face_coupling: Vec<f64>,
    /// Extra diagonal from Dirichlet conditions on removed neighbours.
    pub dirichlet: Vec<f64>,
    pub scal: Vec<f64>,
    /// `c(n) scal` at the nodes.
    pub potential: Vec<f64>,
}

pub fn assemble(space: &ConeSpace, grid: &RadialGrid) -> Result<Assembled> {
    if (grid.length - space.length()).abs() > 1e-12 * space.length() {
        return Err(Error::Parameter("grid and space lengths differ".into()));
    }
    let f = space.f() as i32;
    let vol = space.link.volume;
    let n = grid.len();
    let mut face_coupling = Vec::with_capacity(n - 1);
    for k in 1..n {
        let psi = space.warp.psi(grid.faces[k]);
        if !(psi > 0.0) {
            return Err(Error::InvalidSpace(format!("warp is not positive at face x = {}", grid.faces[k])));
        }
        face_coupling.push(vol * psi.powi(f) / (grid.nodes[k] - grid.nodes[k - 1]));
    }
    let scal = scal_profile(space, &grid.nodes)?;
    let c = space.constants.c;
    let potential = scal.iter().map(|s| c * s).collect();
    Ok(Assembled {
        grid: grid.clone(),
        constants: space.constants,
        face_coupling,
        dirichlet: vec![0.0; n],
        scal,
        potential,
    })
}

impl Assembled {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.grid.weights
    }

    /// `∫ |du|² dV`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        let inner: f64 = self
            .face_coupling
            .iter()
            .enumerate()
            .map(|(k, a)| a * (u[k + 1] - u[k]).powi(2))
            .sum();
        inner + self.dirichlet.iter().zip(u).map(|(d, v)| d * v * v).sum::<f64>()
    }

    /// `∫ u² dV`.
    pub fn mass(&self, u: &[f64]) -> f64 {
        self.grid.weights.iter().zip(u).map(|(w, v)| w * v * v).sum()
    }

    /// `c(n) ∫ scal u² dV`.
    pub fn potential_form(&self, u: &[f64]) -> f64 {
        self.grid
            .weights
            .iter()
            .zip(&self.potential)
            .zip(u)
            .map(|((w, p), v)| w * p * v * v)
            .sum()
    }

    /// Numerator of the Yamabe quotient.
    pub fn numerator(&self, u: &[f64]) -> f64 {
        self.energy(u) + self.potential_form(u)
    }

    /// `Q_s(u) = (E + P) / ‖u‖_s²`.
    pub fn quotient(&self, u: &[f64], s: f64) -> f64 {
        self.numerator(u) / self.grid.norm(u, s).powi(2)
    }

    /// Stiffness applied to `u`: the gradient of the energy over two.
    pub fn stiffness_apply(&self, u: &[f64], out: &mut [f64]) {
        let n = u.len();
        for i in 0..n {
            out[i] = self.dirichlet[i] * u[i];
        }
        for (k, a) in self.face_coupling.iter().enumerate() {
            let d = a * (u[k + 1] - u[k]);
            out[k] -= d;
            out[k + 1] += d;
        }
    }

    /// Discrete Laplacian `Δ_h u` (negative semidefinite).
    pub fn laplacian(&self, u: &[f64]) -> Vec<f64> {
        let mut ku = vec![0.0; u.len()];
        self.stiffness_apply(u, &mut ku);
        ku.iter().zip(&self.grid.weights).map(|(k, w)| -k / w).collect()
    }

    /// Same forms with the potential replaced by `potential`.
    pub fn with_potential(&self, potential: Vec<f64>) -> Self {
        assert_eq!(potential.len(), self.len());
        Self {
            potential,
            ..self.clone()
        }
    }

    /// Forms restricted to the nodes strictly within distance `r` of `tip`,
    /// with a homogeneous Dirichlet condition on the first node outside.
    pub fn restrict_to_ball(&self, tip: Tip, r: f64) -> Result<Self> {
        let len = self.grid.length;
        let inside: Vec<usize> = (0..self.len())
            .filter(|&i| tip.distance(self.grid.nodes[i], len) < r)
            .collect();
        if inside.len() == self.len() {
            return Err(Error::Parameter(format!("ball of radius {r} covers the whole grid")));
        }
        let (lo, hi) = match tip {
            Tip::Start => (0, inside.len()),
            Tip::End => (self.len() - inside.len(), self.len()),
        };
        let m = hi - lo;
        let mut dirichlet = self.dirichlet[lo..hi].to_vec();
        if m > 0 {
            match tip {
                Tip::Start => dirichlet[m - 1] += self.face_coupling[hi - 1],
                Tip::End => dirichlet[0] += self.face_coupling[lo - 1],
            }
        }
        let grid = RadialGrid {
            faces: self.grid.faces[lo..=hi].to_vec(),
            nodes: self.grid.nodes[lo..hi].to_vec(),
            steps: self.grid.steps[lo..hi].to_vec(),
            weights: self.grid.weights[lo..hi].to_vec(),
            length: self.grid.length,
        };
        Ok(Self {
            grid,
            constants: self.constants,
            face_coupling: if m > 1 { self.face_coupling[lo..hi - 1].to_vec() } else { vec![] },
            dirichlet,
            scal: self.scal[lo..hi].to_vec(),
            potential: self.potential[lo..hi].to_vec(),
        })
    }
}

/// Symmetric tridiagonal solve (Thomas algorithm) for `(diag, off)`.
pub(crate) fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut beta = diag[0];
    d[0] = rhs[0] / beta;
    for i in 1..n {
        c[i - 1] = off[i - 1] / beta;
        beta = diag[i] - off[i - 1] * c[i - 1];
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consts::unit_sphere_volume;
    use crate::geometry::LinkSpec;
    use crate::grid::GridSpec;
    use approx::assert_relative_eq;

    #[test]
    fn constant_on_round_sphere() {
        let s = ConeSpace::round_sphere(4).unwrap();
        let g = RadialGrid::graded(&s, &GridSpec::new(800, 1.1, 100.0)).unwrap();
        let a = assemble(&s, &g).unwrap();
        let one = vec![1.0; a.len()];
        assert_eq!(a.energy(&one), 0.0);
        assert_relative_eq!(a.potential_form(&one), 2.0 * unit_sphere_volume(4), max_relative = 1e-4);
    }

    #[test]
    fn flat_cone_has_zero_potential() {
        let link = LinkSpec::round_sphere(3, 1.0, 4).unwrap();
        let s = ConeSpace::exact_cone(link, 1.0, 1.0).unwrap();
        let g = RadialGrid::graded(&s, &GridSpec::new(200, 1.1, 10.0)).unwrap();
        let a = assemble(&s, &g).unwrap();
        assert_eq!(a.numerator(&vec![1.0; a.len()]), 0.0);
    }

    #[test]
    fn linear_function_on_unit_cone() {
        let link = LinkSpec::round_sphere(3, 1.0, 4).unwrap();
        let vol = link.volume;
        let s = ConeSpace::exact_cone(link, 1.0, 1.0).unwrap();
        let g = RadialGrid::graded(&s, &GridSpec::uniform(2000)).unwrap();
        let a = assemble(&s, &g).unwrap();
        let (x0, x1) = (g.nodes[0], g.nodes[g.len() - 1]);
        let exact = vol * (x1.powi(4) - x0.powi(4)) / 4.0;
        assert_relative_eq!(a.energy(&g.nodes), exact, max_relative = 1e-6);
    }

    #[test]
    fn tridiagonal_solver() {
        let diag = [4.0, 5.0, 6.0, 7.0];
        let off = [1.0, -2.0, 0.5];
        let x = [1.0, -1.0, 2.0, 0.5];
        let b: Vec<f64> = (0..4)
            .map(|i| {
                let mut v = diag[i] * x[i];
                if i > 0 {
                    v += off[i - 1] * x[i - 1];
                }
                if i < 3 {
                    v += off[i] * x[i + 1];
                }
                v
            })
            .collect();
        let y = solve_tridiagonal(&diag, &off, &b);
        for (a, b) in x.iter().zip(&y) {
            assert_relative_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn ball_restriction_adds_dirichlet_face() {
        let s = ConeSpace::round_sphere(3).unwrap();
        let g = RadialGrid::graded(&s, &GridSpec::uniform(100)).unwrap();
        let a = assemble(&s, &g).unwrap();
        let b = a.restrict_to_ball(Tip::Start, 0.5).unwrap();
        assert!(b.len() < 20 && b.len() > 10);
        let one = vec![1.0; b.len()];
        assert!(b.energy(&one) > 0.0);
        let e = a.restrict_to_ball(Tip::End, 0.5).unwrap();
        assert_eq!(e.len(), b.len());
        assert_relative_eq!(e.energy(&one), b.energy(&one), max_relative = 1e-9);
    }
}
