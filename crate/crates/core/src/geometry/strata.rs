use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::link::LinkSpec;

/// Curvature record of one singular stratum: `scal ≈ A0/x² + A1/x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumData {
    pub n: usize,
    /// Link dimension.
    pub f: usize,
    #[serde(rename = "A0")]
    pub a0: f64,
    #[serde(rename = "A1")]
    pub a1: f64,
}

impl StratumData {
    pub fn new(n: usize, f: usize, a0: f64, a1: f64) -> Result<Self> {
        let s = Self { n, f, a0, a1 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 || self.f < 1 || self.f + 1 > self.n {
            return Err(Error::InvalidSpace(format!(
                "stratum needs n >= 3 and 1 <= f <= n - 1 (got n = {}, f = {})",
                self.n, self.f
            )));
        }
        if !self.a0.is_finite() || !self.a1.is_finite() {
            return Err(Error::InvalidSpace("stratum coefficients must be finite".into()));
        }
        Ok(())
    }

    /// Dimension of the stratum itself, `n - f - 1`.
    pub fn ell(&self) -> usize {
        self.n - self.f - 1
    }

    /// Whether `f ≤ (n-2)/2`, where the `1/x` term matters.
    pub fn low_codimension(&self) -> bool {
        2 * self.f <= self.n - 2
    }
}

/// Which of the curvature integrability conditions a) b) c) hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Admissibility {
    /// `scal ∈ L^q` for some `q > n/2`.
    pub iv_a: bool,
    /// Morrey-type decay with some `α < 2`.
    pub iv_b: bool,
    /// The decay rate used for `iv_b`: 1 when a `1/x` term is present, else 0.
    pub iv_b_alpha: f64,
    /// `scal⁻ ∈ L^q` for some `q > n/2`.
    pub iv_c: bool,
}

impl Admissibility {
    pub fn any(&self) -> bool {
        self.iv_a || self.iv_b || self.iv_c
    }

    /// Whether a lower bound on solutions is guaranteed (a or b).
    pub fn positivity_guaranteed(&self) -> bool {
        self.iv_a || self.iv_b
    }
}

impl fmt::Display for Admissibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "iv_a={} iv_b={} (alpha={}) iv_c={}",
            self.iv_a, self.iv_b, self.iv_b_alpha, self.iv_c
        )
    }
}

/// Classifies the curvature conditions from per-stratum coefficients.
/// Coefficients with `|A| <= tol` count as zero.
pub fn admissibility_with_tol(strata: &[StratumData], tol: f64) -> Admissibility {
    let zero = |a: f64| a.abs() <= tol;
    let nonneg = |a: f64| a >= -tol;
    let iv_a = strata.iter().all(|s| zero(s.a0) && (!s.low_codimension() || zero(s.a1)));
    let iv_b = strata.iter().all(|s| zero(s.a0));
    let iv_b_alpha = if strata.iter().any(|s| !zero(s.a1)) { 1.0 } else { 0.0 };
    let iv_c = strata.iter().all(|s| nonneg(s.a0) && (!s.low_codimension() || nonneg(s.a1)));
    Admissibility {
        iv_a,
        iv_b,
        iv_b_alpha,
        iv_c,
    }
}

pub fn admissibility(strata: &[StratumData]) -> Admissibility {
    admissibility_with_tol(strata, 0.0)
}

/// Tangent-cone model at a point of a stratum.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    /// Smooth point: model is `R^n`, conformal to the round sphere.
    RoundSphere { n: usize },
    /// `R^ℓ × C(Z)`, conformal to `H^{ℓ+1} × Z`.
    Stratum { ell: usize, f: usize, link_scal: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalModel {
    pub kind: ModelKind,
    pub model: String,
    pub cylinder_form: String,
}

/// Model problems whose Yamabe invariants make up the local invariant of an
/// `n`-dimensional space: the round sphere for the regular part plus one
/// entry per stratum.
pub fn local_yamabe_model(n: usize, strata: &[(StratumData, LinkSpec)]) -> Vec<LocalModel> {
    let mut out = Vec::with_capacity(strata.len() + 1);
    out.push(LocalModel {
        kind: ModelKind::RoundSphere { n },
        model: format!("R^{n}"),
        cylinder_form: format!("S^{n} (round)"),
    });
    for (s, link) in strata {
        let ell = s.ell();
        let model = if ell == 0 {
            format!("C(Z^{})", s.f)
        } else {
            format!("R^{ell} x C(Z^{})", s.f)
        };
        let cylinder_form = if ell == 0 {
            format!("R x Z^{}", s.f)
        } else {
            format!("H^{} x Z^{}", ell + 1, s.f)
        };
        out.push(LocalModel {
            kind: ModelKind::Stratum {
                ell,
                f: s.f,
                link_scal: link.scal,
            },
            model,
            cylinder_form,
        });
    }
    out
}
