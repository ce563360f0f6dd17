use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{fd_weights, interp_linear};

/// Value and first two derivatives of a warp function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpJet {
    pub psi: f64,
    pub dpsi: f64,
    pub ddpsi: f64,
}

/// End of the radial interval `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tip {
    Start,
    End,
}

impl Tip {
    /// Distance from `x` to this end.
    pub fn distance(self, x: f64, length: f64) -> f64 {
        match self {
            Tip::Start => x,
            Tip::End => length - x,
        }
    }

    /// Point at distance `d` from this end.
    pub fn point(self, d: f64, length: f64) -> f64 {
        match self {
            Tip::Start => d,
            Tip::End => length - d,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Tip::Start => "0",
            Tip::End => "L",
        }
    }
}

/// Difference stencils for sampled warps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stencil {
    /// Centered three-point stencils, one-sided at the two ends.
    #[default]
    Centered,
    /// Forward three-point stencils, backward at the last two samples.
    OneSided,
}

/// Warp sampled on a grid in `(0, L)` with differentiated samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWarp {
    pub x: Vec<f64>,
    pub psi: Vec<f64>,
    pub length: f64,
    dpsi: Vec<f64>,
    ddpsi: Vec<f64>,
    stencil: Stencil,
}

impl SampledWarp {
    pub fn new(x: Vec<f64>, psi: Vec<f64>, length: f64) -> Result<Self> {
        Self::with_stencil(x, psi, length, Stencil::Centered)
    }

    pub fn with_stencil(x: Vec<f64>, psi: Vec<f64>, length: f64, stencil: Stencil) -> Result<Self> {
        if x.len() != psi.len() || x.len() < 4 {
            return Err(Error::InvalidSpace("sampled warp needs >= 4 matching (x, psi) samples".into()));
        }
        if !(length > 0.0) {
            return Err(Error::InvalidSpace("warp length must be positive".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) || x[0] <= 0.0 || *x.last().unwrap() >= length {
            return Err(Error::InvalidSpace("warp samples must be strictly increasing inside (0, L)".into()));
        }
        if let Some(i) = psi.iter().position(|&p| !(p > 0.0)) {
            return Err(Error::InvalidSpace(format!("warp must be positive; psi[{i}] = {}", psi[i])));
        }
        let n = x.len();
        let mut dpsi = vec![0.0; n];
        let mut ddpsi = vec![0.0; n];
        for i in 0..n {
            let s = match stencil {
                Stencil::Centered => i.saturating_sub(1).min(n - 3),
                Stencil::OneSided => i.min(n - 3),
            };
            let w = fd_weights(x[i], &x[s..s + 3], 2);
            dpsi[i] = (0..3).map(|k| w[1][k] * psi[s + k]).sum();
            ddpsi[i] = (0..3).map(|k| w[2][k] * psi[s + k]).sum();
        }
        Ok(Self {
            x,
            psi,
            length,
            dpsi,
            ddpsi,
            stencil,
        })
    }

    pub fn stencil(&self) -> Stencil {
        self.stencil
    }

    fn jet(&self, x: f64) -> WarpJet {
        WarpJet {
            psi: interp_linear(&self.x, &self.psi, x),
            dpsi: interp_linear(&self.x, &self.dpsi, x),
            ddpsi: interp_linear(&self.x, &self.ddpsi, x),
        }
    }

    /// Whether the linear extrapolation of the samples closes up at `tip`.
    fn closes_at(&self, tip: Tip) -> bool {
        let (i, d) = match tip {
            Tip::Start => (0, self.x[0]),
            Tip::End => (self.x.len() - 1, self.length - self.x[self.x.len() - 1]),
        };
        let slope = match tip {
            Tip::Start => self.dpsi[i],
            Tip::End => -self.dpsi[i],
        };
        let end_value = self.psi[i] - d * slope;
        let scale = self.psi.iter().cloned().fold(0.0, f64::max);
        end_value.abs() <= 1e-3 * scale
    }
}

/// Radial warp `ψ` of a metric `dx² + ψ(x)² k` on `[0, L] × Z`.
#[derive(Debug, Clone, PartialEq)]
pub enum WarpProfile {
    /// `ψ(x) = ρ (L/π) sin(π x / L)`: two conic tips of slope `ρ`.
    Spindle { rho: f64, length: f64 },
    /// `ψ(x) = ρ x`: exact cone, tip at `x = 0`, boundary at `x = L`.
    Cone { rho: f64, length: f64 },
    Sampled(SampledWarp),
}

impl WarpProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            WarpProfile::Spindle { rho, length } | WarpProfile::Cone { rho, length } => {
                if !(*rho > 0.0) || !(*length > 0.0) || !rho.is_finite() || !length.is_finite() {
                    return Err(Error::InvalidSpace(format!(
                        "warp needs rho > 0 and L > 0 (got rho = {rho}, L = {length})"
                    )));
                }
                Ok(())
            }
            WarpProfile::Sampled(_) => Ok(()),
        }
    }

    pub fn length(&self) -> f64 {
        match self {
            WarpProfile::Spindle { length, .. } | WarpProfile::Cone { length, .. } => *length,
            WarpProfile::Sampled(s) => s.length,
        }
    }

    pub fn jet(&self, x: f64) -> WarpJet {
        match *self {
            WarpProfile::Spindle { rho, length } => {
                let k = PI / length;
                let (s, c) = (k * x).sin_cos();
                WarpJet {
                    psi: rho * s / k,
                    dpsi: rho * c,
                    ddpsi: -rho * k * s,
                }
            }
            WarpProfile::Cone { rho, .. } => WarpJet {
                psi: rho * x,
                dpsi: rho,
                ddpsi: 0.0,
            },
            WarpProfile::Sampled(ref s) => s.jet(x),
        }
    }

    pub fn psi(&self, x: f64) -> f64 {
        self.jet(x).psi
    }

    /// Whether `ψ` closes up (vanishes) at the given end.
    pub fn is_tip(&self, tip: Tip) -> bool {
        match self {
            WarpProfile::Spindle { .. } => true,
            WarpProfile::Cone { .. } => tip == Tip::Start,
            WarpProfile::Sampled(s) => s.closes_at(tip),
        }
    }

    pub fn tips(&self) -> Vec<Tip> {
        [Tip::Start, Tip::End].into_iter().filter(|&t| self.is_tip(t)).collect()
    }

    /// Limit of `ψ(x)/dist(x, tip)` at a tip.
    pub fn tip_slope(&self, tip: Tip) -> Option<f64> {
        if !self.is_tip(tip) {
            return None;
        }
        match self {
            WarpProfile::Spindle { rho, .. } | WarpProfile::Cone { rho, .. } => Some(*rho),
            WarpProfile::Sampled(s) => Some(match tip {
                Tip::Start => s.dpsi[0],
                Tip::End => -s.dpsi[s.dpsi.len() - 1],
            }),
        }
    }

    /// Whether `ψ = ρ·x` holds exactly (to `tol` relative) on `[lo, hi]`.
    pub fn is_exact_cone_on(&self, lo: f64, hi: f64, tol: f64) -> Option<f64> {
        match self {
            WarpProfile::Cone { rho, length } if hi <= *length => Some(*rho),
            WarpProfile::Cone { .. } => None,
            WarpProfile::Spindle { .. } | WarpProfile::Sampled(_) => {
                let rho = self.tip_slope(Tip::Start)?;
                let ok = crate::quadrature::geomspace(lo, hi, 64)
                    .iter()
                    .all(|&x| (self.psi(x) - rho * x).abs() <= tol * rho * x);
                ok.then_some(rho)
            }
        }
    }
}
