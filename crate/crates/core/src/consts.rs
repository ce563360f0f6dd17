use crate::error::{Error, Result};

/// Conformal coupling constant `(m - 2) / (4 (m - 1))` of dimension `m`.
pub fn conformal_coupling(m: f64) -> f64 {
    (m - 2.0) / (4.0 * (m - 1.0))
}

/// Dimension-dependent constants of the Yamabe equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YamabeConstants {
    /// Ambient dimension.
    pub n: usize,
    /// Conformal coupling `(n-2)/(4(n-1))`.
    pub c: f64,
    /// Critical nonlinearity exponent `(n+2)/(n-2)`.
    pub tau: f64,
    /// Critical Sobolev exponent `2n/(n-2)`.
    pub crit: f64,
}

impl YamabeConstants {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Parameter(format!("dimension must be >= 3, got {n}")));
        }
        let nf = n as f64;
        Ok(Self {
            n,
            c: conformal_coupling(nf),
            tau: (nf + 2.0) / (nf - 2.0),
            crit: 2.0 * nf / (nf - 2.0),
        })
    }

    pub fn dim(&self) -> f64 {
        self.n as f64
    }

    /// Lebesgue exponent `2p/(p-2)` of the subcritical problem with parameter `p`.
    pub fn subcritical_exponent(p: f64) -> f64 {
        2.0 * p / (p - 2.0)
    }
}

/// Riemannian volume of the unit round sphere `S^k`.
pub fn unit_sphere_volume(k: usize) -> f64 {
    use std::f64::consts::PI;
    // Vol(S^k) = 2 pi / (k - 1) * Vol(S^{k-2})
    let (mut vol, start) = if k % 2 == 0 { (2.0, 0) } else { (2.0 * PI, 1) };
    let mut j = start;
    while j < k {
        j += 2;
        vol *= 2.0 * PI / (j as f64 - 1.0);
    }
    vol
}
