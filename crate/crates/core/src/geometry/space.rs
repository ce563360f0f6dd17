use std::f64::consts::PI;

use crate::consts::YamabeConstants;
use crate::error::{Error, Result};
use crate::geometry::link::LinkSpec;
use crate::geometry::warp::{Tip, WarpProfile};
use crate::spectrum::DEFAULT_J_MAX;

/// Warped product `([0, L] × Z, dx² + ψ(x)² k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSpace {
    pub constants: YamabeConstants,
    pub link: LinkSpec,
    pub warp: WarpProfile,
}

impl ConeSpace {
    pub fn new(link: LinkSpec, warp: WarpProfile) -> Result<Self> {
        link.validate()?;
        warp.validate()?;
        let constants = YamabeConstants::new(link.f + 1)?;
        Ok(Self {
            constants,
            link,
            warp,
        })
    }

    /// Spindle with tip slope `rho` over the unit round `S^{n-1}`.
    pub fn round_spindle(n: usize, rho: f64, length: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::Parameter(format!("dimension must be >= 3, got {n}")));
        }
        Self::new(
            LinkSpec::round_sphere(n - 1, 1.0, DEFAULT_J_MAX)?,
            WarpProfile::Spindle { rho, length },
        )
    }

    /// The round sphere `S^n` as the spindle `ψ = sin` on `[0, π]`.
    pub fn round_sphere(n: usize) -> Result<Self> {
        Self::round_spindle(n, 1.0, PI)
    }

    /// Exact cone `ψ = ρ x` on `[0, L]` over the given link.
    pub fn exact_cone(link: LinkSpec, rho: f64, length: f64) -> Result<Self> {
        Self::new(link, WarpProfile::Cone { rho, length })
    }

    pub fn n(&self) -> usize {
        self.constants.n
    }

    pub fn f(&self) -> usize {
        self.link.f
    }

    pub fn length(&self) -> f64 {
        self.warp.length()
    }

    /// The link seen from a tip, `(Z, ρ² k)`.
    pub fn tip_link(&self, tip: Tip) -> Option<LinkSpec> {
        self.warp.tip_slope(tip).map(|rho| self.link.scaled(rho))
    }

    /// Scalar curvature of the warped product at `x`.
    pub fn scal_at(&self, x: f64) -> Result<f64> {
        let f = self.f() as f64;
        let ff = f * (f - 1.0);
        let sk = self.link.scal;
        let bad = |psi: f64| Error::InvalidSpace(format!("warp is not positive at x = {x} (psi = {psi})"));
        match self.warp {
            // closed forms that avoid cancellation in 1 - ψ'² near the tips
            WarpProfile::Spindle { rho, length } => {
                let k = PI / length;
                let s = (k * x).sin();
                if !(s > 0.0) {
                    return Err(bad(rho * s / k));
                }
                let k2 = k * k;
                Ok(2.0 * f * k2 + ff * k2 + k2 * (sk - ff * rho * rho) / (rho * rho * s * s))
            }
            WarpProfile::Cone { rho, .. } => {
                if !(x > 0.0) {
                    return Err(bad(rho * x));
                }
                Ok((sk - ff * rho * rho) / (rho * rho * x * x))
            }
            WarpProfile::Sampled(_) => {
                let j = self.warp.jet(x);
                if !(j.psi > 0.0) {
                    return Err(bad(j.psi));
                }
                Ok(-2.0 * f * j.ddpsi / j.psi + (sk - ff * j.dpsi * j.dpsi) / (j.psi * j.psi))
            }
        }
    }
}

/// Pointwise scalar curvature on `grid` (points inside `(0, L)`).
pub fn scal_profile(space: &ConeSpace, grid: &[f64]) -> Result<Vec<f64>> {
    let l = space.length();
    grid.iter()
        .map(|&x| {
            if !(x > 0.0 && x < l) {
                return Err(Error::Domain(format!("grid point {x} outside (0, {l})")));
            }
            space.scal_at(x)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::warp::SampledWarp;
    use approx::assert_relative_eq;

    #[test]
    fn round_sphere_has_constant_curvature() {
        for n in 3..8 {
            let s = ConeSpace::round_sphere(n).unwrap();
            let grid: Vec<f64> = [1e-9, 1e-4, 0.3, 1.5, 3.0, PI - 1e-6].to_vec();
            for v in scal_profile(&s, &grid).unwrap() {
                assert_relative_eq!(v, (n * (n - 1)) as f64, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn exact_cone_formula() {
        let link = LinkSpec::round_sphere(3, 1.0, 4).unwrap();
        let mut l2 = link.clone();
        l2.scal = 2.0;
        let s = ConeSpace::exact_cone(l2, 1.0, 1.0).unwrap();
        assert_relative_eq!(s.scal_at(0.25).unwrap(), (2.0 - 6.0) * 16.0, max_relative = 1e-14);
        let flat = ConeSpace::exact_cone(link, 1.0, 1.0).unwrap();
        assert_eq!(flat.scal_at(0.5).unwrap(), 0.0);
    }

    #[test]
    fn spindle_leading_coefficient() {
        // x² scal -> f(f-1)(1-ρ²)/ρ² at the tip
        for &rho in &[0.5, 0.8, 1.3] {
            let s = ConeSpace::round_spindle(5, rho, PI).unwrap();
            let x = 1e-5;
            let lead = 12.0 * (1.0 - rho * rho) / (rho * rho);
            assert_relative_eq!(x * x * s.scal_at(x).unwrap(), lead, max_relative = 1e-6, epsilon = 1e-8);
        }
    }

    #[test]
    fn nonpositive_warp_is_rejected() {
        let s = ConeSpace::round_sphere(4).unwrap();
        assert!(scal_profile(&s, &[0.0]).is_err());
        assert!(scal_profile(&s, &[4.0]).is_err());
    }

    #[test]
    fn sampled_warp_matches_analytic() {
        let n = 2000;
        let x: Vec<f64> = (1..=n).map(|i| i as f64 * PI / (n + 1) as f64).collect();
        let psi: Vec<f64> = x.iter().map(|t| t.sin()).collect();
        let link = LinkSpec::round_sphere(3, 1.0, 4).unwrap();
        let s = ConeSpace::new(link, WarpProfile::Sampled(SampledWarp::new(x.clone(), psi, PI).unwrap())).unwrap();
        for &t in &x[100..1900] {
            assert_relative_eq!(s.scal_at(t).unwrap(), 12.0, max_relative = 1e-3);
        }
    }
}
