use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConeSpace, LinkSpec, SampledWarp, SpectrumEntry, StratumData, WarpProfile};
use crate::spectrum::DEFAULT_J_MAX;

/// Link of a space file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LinkSection {
    RoundSphere {
        f: usize,
        #[serde(default = "one")]
        radius: f64,
        #[serde(default = "default_j_max")]
        j_max: usize,
    },
    FlatTorus {
        f: usize,
        a: f64,
        #[serde(default = "default_j_max")]
        j_max: usize,
    },
    Explicit {
        f: usize,
        volume: f64,
        scal: f64,
        spectrum: Vec<SpectrumEntry>,
    },
}

fn one() -> f64 {
    1.0
}

fn default_j_max() -> usize {
    DEFAULT_J_MAX
}

/// Warp of a space file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WarpSection {
    Spindle { rho: f64, length: f64 },
    Cone { rho: f64, length: f64 },
    Sampled { x: Vec<f64>, psi: Vec<f64>, length: f64 },
}

/// Top level of a space description.
///
/// ```toml
/// dimension = 4
/// [link]
/// kind = "round_sphere"
/// f = 3
/// [warp]
/// kind = "spindle"
/// rho = 0.5
/// length = 3.141592653589793
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    /// Optional cross-check of `f + 1`.
    pub dimension: Option<usize>,
    pub link: LinkSection,
    pub warp: WarpSection,
}

impl SpaceFile {
    pub fn build(&self) -> Result<ConeSpace> {
        let link = match &self.link {
            LinkSection::RoundSphere { f, radius, j_max } => LinkSpec::round_sphere(*f, *radius, *j_max)?,
            LinkSection::FlatTorus { f, a, j_max } => LinkSpec::flat_torus(*f, *a, *j_max)?,
            LinkSection::Explicit {
                f,
                volume,
                scal,
                spectrum,
            } => LinkSpec::new(*f, *volume, *scal, spectrum.clone())?,
        };
        if let Some(n) = self.dimension {
            if n != link.f + 1 {
                return Err(Error::InvalidSpace(format!(
                    "dimension = {n} but the link has dimension {} (expected {})",
                    link.f,
                    link.f + 1
                )));
            }
        }
        let warp = match &self.warp {
            WarpSection::Spindle { rho, length } => WarpProfile::Spindle {
                rho: *rho,
                length: *length,
            },
            WarpSection::Cone { rho, length } => WarpProfile::Cone {
                rho: *rho,
                length: *length,
            },
            WarpSection::Sampled { x, psi, length } => {
                WarpProfile::Sampled(SampledWarp::new(x.clone(), psi.clone(), *length)?)
            }
        };
        ConeSpace::new(link, warp)
    }
}

fn toml_error(what: &str, e: toml::de::Error) -> Error {
    Error::Parse(format!("{what}: {e}"))
}

/// Parses and validates a space description.
pub fn parse_space(text: &str) -> Result<(SpaceFile, ConeSpace)> {
    let file: SpaceFile = toml::from_str(text).map_err(|e| toml_error("space file", e))?;
    let space = file.build()?;
    Ok((file, space))
}

/// A list of singular strata.
///
/// ```toml
/// dimension = 4
/// [[stratum]]
/// n = 4
/// f = 3
/// A0 = 0.0
/// A1 = 1.0
/// ```
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrataFile {
    pub dimension: Option<usize>,
    #[serde(default)]
    pub stratum: Vec<StratumData>,
}

pub fn parse_strata(text: &str) -> Result<StrataFile> {
    let file: StrataFile = toml::from_str(text).map_err(|e| toml_error("strata file", e))?;
    for (i, s) in file.stratum.iter().enumerate() {
        s.validate().map_err(|e| Error::Parse(format!("stratum {}: {e}", i + 1)))?;
        if let Some(n) = file.dimension {
            if s.n != n {
                return Err(Error::Parse(format!("stratum {}: n = {} differs from dimension = {n}", i + 1, s.n)));
            }
        }
    }
    if file.dimension.is_none() {
        if let Some(first) = file.stratum.first() {
            if file.stratum.iter().any(|s| s.n != first.n) {
                return Err(Error::Parse("strata disagree on n".into()));
            }
        }
    }
    Ok(file)
}
