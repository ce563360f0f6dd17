use serde::{Deserialize, Serialize};

use crate::consts::unit_sphere_volume;
use crate::error::{Error, Result};
use crate::spectrum::sphere_spectrum;

/// One eigenvalue of a truncated spectrum with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub eigenvalue: f64,
    pub multiplicity: u64,
}

/// A compact link `(Z, k)` described by spectral data.
///
/// Only links with constant scalar curvature are supported by the radial
/// solver; `homogeneous = false` marks a record-only link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSpec {
    pub f: usize,
    pub volume: f64,
    pub scal: f64,
    /// Ascending eigenvalues of `-Δ_k`, starting at 0 with multiplicity 1.
    pub laplace_spectrum: Vec<SpectrumEntry>,
    pub homogeneous: bool,
}

impl LinkSpec {
    pub fn new(f: usize, volume: f64, scal: f64, laplace_spectrum: Vec<SpectrumEntry>) -> Result<Self> {
        let link = Self {
            f,
            volume,
            scal,
            laplace_spectrum,
            homogeneous: true,
        };
        link.validate()?;
        Ok(link)
    }

    /// Round sphere `S^f` of the given radius, spectrum truncated at `j_max`.
    pub fn round_sphere(f: usize, radius: f64, j_max: usize) -> Result<Self> {
        if f == 0 || !(radius > 0.0) {
            return Err(Error::Parameter(format!(
                "round sphere needs f >= 1 and radius > 0 (got f = {f}, radius = {radius})"
            )));
        }
        let table = sphere_spectrum(f, radius, j_max);
        Self::new(
            f,
            unit_sphere_volume(f) * radius.powi(f as i32),
            (f * (f - 1)) as f64 / (radius * radius),
            table.entries,
        )
    }

    /// Flat torus `R^f / (2π a Z)^f`, for the zero-potential case.
    pub fn flat_torus(f: usize, a: f64, j_max: usize) -> Result<Self> {
        // eigenvalues |k|^2 / a^2 over integer vectors k, grouped
        let kmax = (j_max as f64).sqrt().ceil() as i64 + 1;
        let mut counts = std::collections::BTreeMap::<u64, u64>::new();
        let mut idx = vec![-kmax; f];
        loop {
            let s: i64 = idx.iter().map(|k| k * k).sum();
            if s as usize <= j_max {
                *counts.entry(s as u64).or_default() += 1;
            }
            let mut d = 0;
            while d < f {
                idx[d] += 1;
                if idx[d] <= kmax {
                    break;
                }
                idx[d] = -kmax;
                d += 1;
            }
            if d == f {
                break;
            }
        }
        let entries = counts
            .into_iter()
            .map(|(s, m)| SpectrumEntry {
                eigenvalue: s as f64 / (a * a),
                multiplicity: m,
            })
            .collect();
        Self::new(f, (2.0 * std::f64::consts::PI * a).powi(f as i32), 0.0, entries)
    }

    pub fn validate(&self) -> Result<()> {
        if self.f == 0 {
            return Err(Error::InvalidSpace("link dimension must be >= 1".into()));
        }
        if !(self.volume > 0.0) || !self.volume.is_finite() {
            return Err(Error::InvalidSpace(format!("link volume must be positive, got {}", self.volume)));
        }
        if !self.scal.is_finite() {
            return Err(Error::InvalidSpace("link scalar curvature must be finite".into()));
        }
        let first = self
            .laplace_spectrum
            .first()
            .ok_or_else(|| Error::InvalidSpace("link spectrum is empty".into()))?;
        if first.eigenvalue != 0.0 || first.multiplicity != 1 {
            return Err(Error::InvalidSpace(
                "link spectrum must start with eigenvalue 0 of multiplicity 1".into(),
            ));
        }
        for w in self.laplace_spectrum.windows(2) {
            if !(w[1].eigenvalue >= w[0].eigenvalue) {
                return Err(Error::InvalidSpace("link spectrum must be nondecreasing".into()));
            }
        }
        if self.laplace_spectrum.iter().any(|e| e.multiplicity == 0 || e.eigenvalue < 0.0) {
            return Err(Error::InvalidSpace(
                "link spectrum needs nonnegative eigenvalues with positive multiplicities".into(),
            ));
        }
        Ok(())
    }

    /// The link with metric `factor² · k`.
    pub fn scaled(&self, factor: f64) -> LinkSpec {
        let s2 = factor * factor;
        LinkSpec {
            f: self.f,
            volume: self.volume * factor.powi(self.f as i32),
            scal: self.scal / s2,
            laplace_spectrum: self
                .laplace_spectrum
                .iter()
                .map(|e| SpectrumEntry {
                    eigenvalue: e.eigenvalue / s2,
                    multiplicity: e.multiplicity,
                })
                .collect(),
            homogeneous: self.homogeneous,
        }
    }

    /// True when `k` is Einstein-normalized in the sense `scal_k = f(f-1)`.
    pub fn is_cone_flat(&self, tol: f64) -> bool {
        let target = (self.f * (self.f - 1)) as f64;
        (self.scal - target).abs() <= tol * target.max(1.0)
    }
}
