//! Spectra of the operator family `-L^m_k = -Δ_k + c(m) scal_k` on homogeneous
//! links, indicial roots at conic and edge strata, and the positivity
//! classification that decides whether a tip can be conformally normalized.

use std::fmt;
use std::io::{Read, Write};

use crate::consts::{conformal_coupling, YamabeConstants};
use crate::error::{Error, Result};
use crate::geometry::link::{LinkSpec, SpectrumEntry};
use crate::io::fmt_f64;

/// Default number of spherical-harmonic degrees kept in a table.
pub const DEFAULT_J_MAX: usize = 32;

/// Relative tolerance of the threshold comparison in [`positivity_check`].
pub const THRESHOLD_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorTag {
    /// `-Δ_k`.
    Laplacian,
    /// `-L^m_k`.
    Family { m: usize },
    /// `-L^n_{k'} - c(n) f'(f'-1)` on the link of an edge stratum.
    ShiftedEdge { n: usize, f_prime: usize },
}

impl fmt::Display for OperatorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorTag::Laplacian => write!(f, "laplacian"),
            OperatorTag::Family { m } => write!(f, "family_m{m}"),
            OperatorTag::ShiftedEdge { n, f_prime } => write!(f, "shifted_edge_n{n}_f{f_prime}"),
        }
    }
}

/// Truncated spectrum: ascending eigenvalues with multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub entries: Vec<SpectrumEntry>,
    pub operator: OperatorTag,
    pub truncation: usize,
}

impl SpectrumTable {
    pub fn new(entries: Vec<SpectrumEntry>, operator: OperatorTag) -> Result<Self> {
        if entries.iter().any(|e| e.multiplicity == 0) {
            return Err(Error::Parameter("multiplicities must be positive".into()));
        }
        if entries.windows(2).any(|w| !(w[1].eigenvalue >= w[0].eigenvalue)) {
            return Err(Error::Parameter("spectrum table must be ascending".into()));
        }
        let truncation = entries.len();
        Ok(Self {
            entries,
            operator,
            truncation,
        })
    }

    pub fn eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.eigenvalue)
    }

    pub fn lowest(&self) -> Option<f64> {
        self.entries.first().map(|e| e.eigenvalue)
    }

    /// CSV with columns `mode_index,eigenvalue,multiplicity`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["mode_index", "eigenvalue", "multiplicity"])?;
        for (j, e) in self.entries.iter().enumerate() {
            out.write_record([j.to_string(), fmt_f64(e.eigenvalue), e.multiplicity.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, operator: OperatorTag) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["mode_index", "eigenvalue", "multiplicity"] {
            return Err(Error::Parse(format!(
                "expected header mode_index,eigenvalue,multiplicity, got {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut entries = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = |i: usize| rec.get(i).unwrap_or("").trim().to_string();
            let idx: usize = field(0)
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad mode_index", row + 2)))?;
            if idx != row {
                return Err(Error::Parse(format!("row {}: mode_index {idx} out of sequence", row + 2)));
            }
            let eigenvalue: f64 = field(1)
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad eigenvalue", row + 2)))?;
            let multiplicity: u64 = field(2)
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad multiplicity", row + 2)))?;
            entries.push(SpectrumEntry {
                eigenvalue,
                multiplicity,
            });
        }
        Self::new(entries, operator)
    }
}

fn binomial(n: i64, k: i64) -> u64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Spectrum of `-Δ` on the round sphere `S^f(ρ)`: degrees `0..=j_max`.
pub fn sphere_spectrum(f: usize, rho: f64, j_max: usize) -> SpectrumTable {
    let fi = f as i64;
    let entries = (0..=j_max as i64)
        .map(|j| SpectrumEntry {
            eigenvalue: (j * (j + fi - 1)) as f64 / (rho * rho),
            multiplicity: binomial(fi + j, j) - binomial(fi + j - 2, j - 2),
        })
        .collect();
    SpectrumTable {
        entries,
        operator: OperatorTag::Laplacian,
        truncation: j_max + 1,
    }
}

pub fn laplace_table(link: &LinkSpec) -> SpectrumTable {
    SpectrumTable {
        entries: link.laplace_spectrum.clone(),
        operator: OperatorTag::Laplacian,
        truncation: link.laplace_spectrum.len(),
    }
}

/// Spectrum of `-L^m_k`: every Laplace eigenvalue shifted by `c(m) scal_k`.
pub fn family_spectrum(link: &LinkSpec, m: usize) -> Result<SpectrumTable> {
    if m < 3 {
        return Err(Error::Parameter(format!("family index m must be >= 3, got {m}")));
    }
    if !link.homogeneous {
        return Err(Error::UnsupportedLink(
            "family spectrum needs a link with constant scalar curvature".into(),
        ));
    }
    let shift = conformal_coupling(m as f64) * link.scal;
    Ok(SpectrumTable {
        entries: link
            .laplace_spectrum
            .iter()
            .map(|e| SpectrumEntry {
                eigenvalue: e.eigenvalue + shift,
                multiplicity: e.multiplicity,
            })
            .collect(),
        operator: OperatorTag::Family { m },
        truncation: link.laplace_spectrum.len(),
    })
}

/// Constants of the decomposition `-L^p = A(-L^q) + B(-Δ)` for `p < q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyComparison {
    pub a: f64,
    pub b: f64,
    /// Largest entrywise deviation of `μ_j(p) - (A μ_j(q) + B λ_j)`.
    pub max_identity_error: f64,
}

pub fn family_compare(link: &LinkSpec, p: usize, q: usize) -> Result<FamilyComparison> {
    if p >= q {
        return Err(Error::Ordering(format!(
            "need p < q for positive A and B, got p = {p}, q = {q}"
        )));
    }
    let lp = family_spectrum(link, p)?;
    let lq = family_spectrum(link, q)?;
    let a = conformal_coupling(p as f64) / conformal_coupling(q as f64);
    let b = 1.0 - a;
    let max_identity_error = lp
        .entries
        .iter()
        .zip(&lq.entries)
        .zip(&link.laplace_spectrum)
        .map(|((mp, mq), l)| (mp.eigenvalue - (a * mq.eigenvalue + b * l.eigenvalue)).abs())
        .fold(0.0, f64::max);
    Ok(FamilyComparison {
        a,
        b,
        max_identity_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootPair {
    pub mode: usize,
    pub minus: f64,
    pub plus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootKind {
    Conic,
    Edge { f_prime: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicialRoots {
    pub roots: Vec<RootPair>,
    pub kind: RootKind,
    /// Set when the lowest pair collapses to a double root.
    pub degenerate: bool,
}

impl IndicialRoots {
    pub fn leading_plus(&self) -> Option<f64> {
        self.roots.first().map(|r| r.plus)
    }
}

/// Conic indicial roots `±sqrt(λ_j)` of a `-L^n` table.
pub fn conic_indicial_roots(spec: &SpectrumTable) -> Result<IndicialRoots> {
    let mut roots = Vec::with_capacity(spec.entries.len());
    for (mode, e) in spec.entries.iter().enumerate() {
        if e.eigenvalue < 0.0 {
            return Err(Error::ComplexIndicialRoot {
                mode,
                discriminant: e.eigenvalue,
            });
        }
        let s = e.eigenvalue.sqrt();
        roots.push(RootPair { mode, minus: -s, plus: s });
    }
    let degenerate = spec.lowest() == Some(0.0);
    Ok(IndicialRoots {
        roots,
        kind: RootKind::Conic,
        degenerate,
    })
}

/// Eigenvalues `μ_j` of `-L^n_{k'} - c(n) f'(f'-1)` for an edge link `k'`.
pub fn shifted_edge_spectrum(link: &LinkSpec, n: usize) -> Result<SpectrumTable> {
    let base = family_spectrum(link, n)?;
    let fp = link.f as f64;
    let shift = conformal_coupling(n as f64) * fp * (fp - 1.0);
    Ok(SpectrumTable {
        entries: base
            .entries
            .iter()
            .map(|e| SpectrumEntry {
                eigenvalue: e.eigenvalue - shift,
                multiplicity: e.multiplicity,
            })
            .collect(),
        operator: OperatorTag::ShiftedEdge { n, f_prime: link.f },
        truncation: base.truncation,
    })
}

/// Edge indicial roots `-(f'-1)/2 ± sqrt((f'-1)²/4 + μ_j)`.
pub fn edge_indicial_roots(f_prime: usize, shifted: &SpectrumTable) -> Result<IndicialRoots> {
    let h = (f_prime as f64 - 1.0) / 2.0;
    let mut roots = Vec::with_capacity(shifted.entries.len());
    for (mode, e) in shifted.entries.iter().enumerate() {
        let disc = h * h + e.eigenvalue;
        if disc < 0.0 {
            return Err(Error::ComplexIndicialRoot {
                mode,
                discriminant: disc,
            });
        }
        let s = disc.sqrt();
        roots.push(RootPair {
            mode,
            minus: -h - s,
            plus: -h + s,
        });
    }
    let degenerate = roots.first().map(|r| r.plus == r.minus).unwrap_or(false);
    Ok(IndicialRoots {
        roots,
        kind: RootKind::Edge { f_prime },
        degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Positivity {
    StrictlyAbove,
    EqualsThreshold,
    Below,
}

impl fmt::Display for Positivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Positivity::StrictlyAbove => "strictly_above",
            Positivity::EqualsThreshold => "equals_threshold",
            Positivity::Below => "below",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityReport {
    /// Position of `λ_0` relative to `c(n) f(f-1)`.
    pub classification: Positivity,
    /// Whether `λ_0 > 0`, the hypothesis for existence with incomplete minimizers.
    pub strictly_positive: bool,
    pub lambda0: f64,
    pub threshold: f64,
    pub tolerance: f64,
}

pub fn positivity_check(spec: &SpectrumTable, consts: &YamabeConstants, f: usize) -> Result<PositivityReport> {
    let lambda0 = spec
        .lowest()
        .ok_or_else(|| Error::Parameter("positivity check needs a nonempty table".into()))?;
    let fp = f as f64;
    let threshold = consts.c * fp * (fp - 1.0);
    let gap = lambda0 - threshold;
    let classification = if gap.abs() <= THRESHOLD_RTOL * threshold.abs().max(f64::MIN_POSITIVE) {
        Positivity::EqualsThreshold
    } else if gap > 0.0 {
        Positivity::StrictlyAbove
    } else {
        Positivity::Below
    };
    Ok(PositivityReport {
        classification,
        strictly_positive: lambda0 > 0.0,
        lambda0,
        threshold,
        tolerance: THRESHOLD_RTOL,
    })
}

/// Leading exponent `(δ-1)(n-2)/2` of a solution at a normalized conic tip.
pub fn predicted_tip_exponent(delta: f64, consts: &YamabeConstants) -> f64 {
    (delta - 1.0) * (consts.dim() - 2.0) / 2.0
}
