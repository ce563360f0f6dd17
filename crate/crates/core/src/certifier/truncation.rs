//! Truncated power functions used as test functions in the Moser iteration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// `f_α(x) = x^α` for `x ≤ x*` and `x + α^{-α/(α-1)} - x*` beyond, with
/// `x* = α^{-1/(α-1)}`; `φ_{α,L}(x) = L^α f_α(x/L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationParams {
    pub alpha: f64,
    pub l: f64,
    pub breakpoint: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationValues {
    pub f: f64,
    pub phi: f64,
    pub dphi: f64,
    /// `G_{α,L}(x) = ∫_0^x φ'(t)² dt`.
    pub g: f64,
}

impl TruncationParams {
    pub fn new(alpha: f64, l: f64) -> Result<Self> {
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(Error::Parameter(format!("alpha must exceed 1, got {alpha}")));
        }
        if !(l >= 1.0) || !l.is_finite() {
            return Err(Error::Parameter(format!("L must be at least 1, got {l}")));
        }
        Ok(Self {
            alpha,
            l,
            breakpoint: alpha.powf(-1.0 / (alpha - 1.0)),
        })
    }

    /// `f_α(x*) = α^{-α/(α-1)}`.
    pub fn breakpoint_value(&self) -> f64 {
        self.alpha.powf(-self.alpha / (self.alpha - 1.0))
    }

    fn shift(&self) -> f64 {
        self.breakpoint_value() - self.breakpoint
    }

    /// Unscaled `f_α`.
    pub fn f(&self, x: f64) -> f64 {
        if x <= self.breakpoint {
            x.powf(self.alpha)
        } else {
            x + self.shift()
        }
    }
}

pub fn truncation_eval(params: &TruncationParams, x: f64) -> Result<TruncationValues> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("truncation functions need x >= 0, got {x}")));
    }
    let TruncationParams { alpha, l, breakpoint } = *params;
    let xb = l * breakpoint;
    let f = params.f(x / l);
    let g_coef = alpha * alpha / (2.0 * alpha - 1.0);
    let (phi, dphi, g) = if x <= xb {
        (x.powf(alpha), alpha * x.powf(alpha - 1.0), g_coef * x.powf(2.0 * alpha - 1.0))
    } else {
        let slope = l.powf(alpha - 1.0);
        let g_b = g_coef * xb.powf(2.0 * alpha - 1.0);
        (l.powf(alpha) * f, slope, g_b + slope * slope * (x - xb))
    };
    Ok(TruncationValues { f, phi, dphi, g })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationViolation {
    pub x: f64,
    pub inequality: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationCheck {
    pub samples: usize,
    pub passed: bool,
    pub witness: Option<TruncationViolation>,
}

/// Relative slack allowed for rounding.
pub const TRUNCATION_TOL: f64 = 1e-12;

fn exceeds(lhs: f64, rhs: f64) -> bool {
    lhs > rhs + TRUNCATION_TOL * rhs.abs().max(lhs.abs()).max(f64::MIN_POSITIVE)
}

/// Checks `φ(x) ≤ x^α` and `x G(x) ≤ α²/(2α-1) φ(x)²` at every sample.
pub fn verify_truncation_inequalities(params: &TruncationParams, samples: &[f64]) -> Result<TruncationCheck> {
    let k = params.alpha * params.alpha / (2.0 * params.alpha - 1.0);
    for &x in samples {
        let v = truncation_eval(params, x)?;
        let pow = x.powf(params.alpha);
        if exceeds(v.phi, pow) {
            return Ok(TruncationCheck {
                samples: samples.len(),
                passed: false,
                witness: Some(TruncationViolation {
                    x,
                    inequality: "phi <= x^alpha",
                    lhs: v.phi,
                    rhs: pow,
                }),
            });
        }
        let (lhs, rhs) = (x * v.g, k * v.phi * v.phi);
        if exceeds(lhs, rhs) {
            return Ok(TruncationCheck {
                samples: samples.len(),
                passed: false,
                witness: Some(TruncationViolation {
                    x,
                    inequality: "x G <= alpha^2/(2 alpha - 1) phi^2",
                    lhs,
                    rhs,
                }),
            });
        }
    }
    Ok(TruncationCheck {
        samples: samples.len(),
        passed: true,
        witness: None,
    })
}

/// Outcome of [`random_truncation_audit`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationAudit {
    pub draws: usize,
    pub failures: usize,
    /// Largest relative gap between the two branches at the breakpoint.
    pub max_breakpoint_gap: f64,
    pub first_witness: Option<(f64, f64, TruncationViolation)>,
}

/// Checks both inequalities on `draws` seeded draws of `α ∈ (1, 3]`,
/// `L ∈ [1, 100]`, `x ∈ [0, 10 L]`.
pub fn random_truncation_audit(seed: u64, draws: usize) -> Result<TruncationAudit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut first_witness = None;
    let mut max_breakpoint_gap: f64 = 0.0;
    for _ in 0..draws {
        let alpha = 3.0 - rng.gen_range(0.0..2.0);
        let l = rng.gen_range(1.0..=100.0);
        let x = rng.gen_range(0.0..=10.0 * l);
        let p = TruncationParams::new(alpha, l)?;
        let power = p.breakpoint.powf(alpha);
        let linear = p.breakpoint + p.shift();
        max_breakpoint_gap = max_breakpoint_gap.max((power - linear).abs() / power);
        let check = verify_truncation_inequalities(&p, &[x])?;
        if !check.passed {
            failures += 1;
            if first_witness.is_none() {
                first_witness = check.witness.map(|w| (alpha, l, w));
            }
        }
    }
    Ok(TruncationAudit {
        draws,
        failures,
        max_breakpoint_gap,
        first_witness,
    })
}
