use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use singular_yamabe::certifier::ProbeConfig;
use singular_yamabe::solver::SolverConfig;
use singular_yamabe::{Error, Result};

/// Settings of `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Integrability exponent of the Moser ladder; 0 selects `n`.
    pub moser_q: f64,
    pub moser_levels: usize,
    pub match_threshold: f64,
    /// Allowed deviation of `‖u‖_s` from 1 in an input solution.
    pub normalization_tol: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            moser_q: 0.0,
            moser_levels: singular_yamabe::certifier::DEFAULT_LEVELS,
            match_threshold: singular_yamabe::asymptotics::DEFAULT_MATCH_THRESHOLD,
            normalization_tol: 1e-8,
        }
    }
}

/// Settings of `inequalities`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InequalityConfig {
    pub hardy_cells: usize,
    pub hardy_ratio: f64,
    pub hardy_depth: f64,
    pub hardy_probes: usize,
    pub morrey_q: f64,
    pub morrey_alphas: Vec<f64>,
    pub morrey_radii: usize,
    pub truncation_draws: usize,
}

impl Default for InequalityConfig {
    fn default() -> Self {
        Self {
            hardy_cells: 4000,
            hardy_ratio: 1.01,
            hardy_depth: 1e9,
            hardy_probes: 1000,
            morrey_q: 1.5,
            morrey_alphas: vec![0.0, 1.0, 2.0],
            morrey_radii: 13,
            truncation_draws: 10_000,
        }
    }
}

/// Everything a run depends on besides its input files.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub probes: ProbeConfig,
    pub analysis: AnalysisConfig,
    pub inequalities: InequalityConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Parse(format!("config {}: {e}", path.display())))
    }
}

/// Record of a run, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub version: String,
    pub config: RunConfig,
}

impl RunManifest {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(format!("manifest: {e}")))
    }
}
