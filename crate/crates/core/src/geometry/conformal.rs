//! Conformal changes of warped cone metrics: curvature of `w^{4/(n-2)} g`,
//! the `x^{2δ-2}` rescaling that normalizes a tip, and the cone/cylinder
//! correspondence `x^{-2} g = dt² + ρ² k` with `t = -log x`.

use crate::consts::YamabeConstants;
use crate::error::{Error, Result};
use crate::geometry::link::LinkSpec;
use crate::geometry::space::{scal_profile, ConeSpace};
use crate::geometry::warp::Tip;
use crate::quadrature::{derivative, simpson_weights};
use crate::spectrum::family_spectrum;

/// Relative tolerance for `ψ = ρx` on a cylinder-transform window.
pub const EXACT_CONE_RTOL: f64 = 1e-9;

/// Scalar curvature of `ĝ = w^{4/(n-2)} g` for a radial factor `w` sampled on `x`.
pub fn conformal_scal(space: &ConeSpace, x: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    if x.len() != w.len() || x.len() < 3 {
        return Err(Error::Parameter("need >= 3 matching (x, w) samples".into()));
    }
    if let Some(i) = w.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Domain(format!("conformal factor must be positive; w[{i}] = {}", w[i])));
    }
    let scal = scal_profile(space, x)?;
    let k = &space.constants;
    let f = space.f() as f64;
    let dw = derivative(x, w, 1, 3);
    let ddw = derivative(x, w, 2, 3);
    Ok((0..x.len())
        .map(|i| {
            let j = space.warp.jet(x[i]);
            let lap = ddw[i] + f * j.dpsi / j.psi * dw[i];
            -(lap - k.c * scal[i] * w[i]) / k.c * w[i].powf(-k.tau)
        })
        .collect())
}

/// `ξ = x^δ / δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiMap {
    pub delta: f64,
}

impl XiMap {
    pub fn apply(&self, x: f64) -> f64 {
        x.powf(self.delta) / self.delta
    }

    pub fn inverse(&self, xi: f64) -> f64 {
        (self.delta * xi).powf(1.0 / self.delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationResult {
    pub delta: f64,
    pub xi_map: XiMap,
}

impl NormalizationResult {
    /// The link metric scaled by `δ²`.
    pub fn rescale(&self, link: &LinkSpec) -> LinkSpec {
        if self.delta == 1.0 {
            return link.clone();
        }
        link.scaled(self.delta)
    }
}

/// The `δ` with `δ⁻² λ_0 = c(n) f(f-1)`.
pub fn delta_normalization(lambda0: f64, consts: &YamabeConstants, f: usize) -> Result<NormalizationResult> {
    if !(lambda0 > 0.0) {
        return Err(Error::NormalizationImpossible(format!(
            "lowest eigenvalue {lambda0} of -L^n is not positive"
        )));
    }
    if f < 2 {
        return Err(Error::Parameter(format!("normalization needs link dimension f >= 2, got {f}")));
    }
    let fp = f as f64;
    let delta = (lambda0 / (consts.c * fp * (fp - 1.0))).sqrt();
    Ok(NormalizationResult {
        delta,
        xi_map: XiMap { delta },
    })
}

/// Normalization of the tip link `(Z, ρ² k)` of a space.
pub fn normalize_tip(space: &ConeSpace, tip: Tip) -> Result<NormalizationResult> {
    let link = space
        .tip_link(tip)
        .ok_or_else(|| Error::Domain(format!("end {} is not a conic tip", tip.label())))?;
    let spec = family_spectrum(&link, space.n())?;
    delta_normalization(spec.lowest().unwrap_or(0.0), &space.constants, space.f())
}

/// A radial function on the cylinder `(R × Z, dt² + ρ² k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderPicture {
    /// Increasing cylinder coordinate.
    pub t: Vec<f64>,
    pub v: Vec<f64>,
    pub cross_section: LinkSpec,
    pub n: usize,
}

/// `t = -log x`, `v = x^{(n-2)/2} u` on a window where `ψ = ρx`.
pub fn cylinder_transform(space: &ConeSpace, x: &[f64], u: &[f64]) -> Result<CylinderPicture> {
    if x.len() != u.len() || x.is_empty() {
        return Err(Error::Parameter("need matching (x, u) samples".into()));
    }
    if x.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Domain("cylinder window must exclude x = 0".into()));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Parameter("x samples must be strictly increasing".into()));
    }
    let (lo, hi) = (x[0], x[x.len() - 1]);
    let rho = space
        .warp
        .is_exact_cone_on(lo, hi.max(lo * (1.0 + 1e-12)), EXACT_CONE_RTOL)
        .ok_or_else(|| Error::Domain(format!("warp is not an exact cone on [{lo}, {hi}]")))?;
    let a = (space.n() as f64 - 2.0) / 2.0;
    let (mut t, mut v): (Vec<f64>, Vec<f64>) = x.iter().zip(u).map(|(&x, &u)| (-x.ln(), x.powf(a) * u)).unzip();
    t.reverse();
    v.reverse();
    Ok(CylinderPicture {
        t,
        v,
        cross_section: space.link.scaled(rho),
        n: space.n(),
    })
}

/// Yamabe quotient of a radial `u` on the window `[x_0, x_last] × Z`,
/// including the boundary mean-curvature term `(n-2)/2 ∮ H u²` that makes
/// it conformally invariant. Samples are differentiated with five-point
/// stencils and integrated with composite Simpson weights.
pub fn window_quotient(space: &ConeSpace, x: &[f64], u: &[f64]) -> Result<f64> {
    if x.len() != u.len() || x.len() < 5 {
        return Err(Error::Parameter("need >= 5 matching (x, u) samples".into()));
    }
    let k = &space.constants;
    let f = space.f() as i32;
    let scal = scal_profile(space, x)?;
    let du = derivative(x, u, 1, 5);
    let w = simpson_weights(x);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..x.len() {
        let pf = space.warp.psi(x[i]).powi(f);
        num += w[i] * (du[i] * du[i] + k.c * scal[i] * u[i] * u[i]) * pf;
        den += w[i] * u[i].abs().powf(k.crit) * pf;
    }
    let a = (k.dim() - 2.0) / 2.0;
    let flux = |i: usize| {
        let j = space.warp.jet(x[i]);
        j.psi.powi(f - 1) * j.dpsi * u[i] * u[i]
    };
    num += a * (flux(x.len() - 1) - flux(0));
    let vol = space.link.volume;
    Ok(vol * num / (vol * den).powf(1.0 / k.dim() * (k.dim() - 2.0)))
}

/// Yamabe quotient of the cylinder picture; the slices are totally geodesic
/// so no boundary term appears.
pub fn cylinder_quotient(pic: &CylinderPicture) -> Result<f64> {
    if pic.t.len() < 5 {
        return Err(Error::Parameter("need >= 5 cylinder samples".into()));
    }
    let k = YamabeConstants::new(pic.n)?;
    let dv = derivative(&pic.t, &pic.v, 1, 5);
    let w = simpson_weights(&pic.t);
    let sk = pic.cross_section.scal;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..pic.t.len() {
        num += w[i] * (dv[i] * dv[i] + k.c * sk * pic.v[i] * pic.v[i]);
        den += w[i] * pic.v[i].abs().powf(k.crit);
    }
    let vol = pic.cross_section.volume;
    Ok(vol * num / (vol * den).powf((k.dim() - 2.0) / k.dim()))
}
