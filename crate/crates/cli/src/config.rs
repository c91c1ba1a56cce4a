//! Run configuration: a TOML file, `--set key=value` overrides and a few
//! dedicated flags, resolved into one typed tree.

use crate::CliError;
use hklab::harmonic::HarmonicConfig;
use hklab::heatkernel::SolverConfig;
use hklab::potential::PotentialError;
use hklab::{Bump, PotentialSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Not part of the config hash.
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    pub potential: PotentialConfig,
    pub harmonic: HarmonicConfig,
    pub solver: SolverConfig,
    pub mu_star: MuStarConfig,
    pub a2: A2Config,
    pub kernel: KernelConfig,
    pub verify: VerifyConfig,
    pub supersolution: SupersolutionConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Zero,
    InverseSquare,
    Blended,
    Bump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialConfig {
    pub dimension: u32,
    pub family: Family,
    /// Coupling of `inverse_square` and `bump`.
    pub lambda: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub theta: f64,
    pub coupling: f64,
    pub bump: BumpConfig,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        Self {
            dimension: 3,
            family: Family::Zero,
            lambda: 0.0,
            lambda1: 0.0,
            lambda2: 0.0,
            theta: 1.0,
            coupling: 0.0,
            bump: BumpConfig::default(),
        }
    }
}

impl PotentialConfig {
    pub fn build(&self) -> Result<PotentialSpec, PotentialError> {
        let n = self.dimension;
        match self.family {
            Family::Zero => PotentialSpec::zero(n),
            Family::InverseSquare => PotentialSpec::pure(n, self.lambda),
            Family::Blended => PotentialSpec::blended(n, self.lambda1, self.lambda2, self.theta),
            Family::Bump => PotentialSpec::with_bump(n, self.lambda, self.coupling, self.bump.build()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BumpConfig {
    pub amplitude: f64,
    pub inner: f64,
    pub outer: f64,
    pub width: f64,
}

impl Default for BumpConfig {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            inner: 0.0,
            outer: 1.0,
            width: 1e-3,
        }
    }
}

impl BumpConfig {
    pub fn build(&self) -> Bump {
        Bump {
            amplitude: self.amplitude,
            inner: self.inner,
            outer: self.outer,
            width: self.width,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MuStarConfig {
    pub bracket: (f64, f64),
    pub tol: f64,
    pub bump: BumpConfig,
}

impl Default for MuStarConfig {
    fn default() -> Self {
        Self {
            bracket: (1.0, 4.0),
            tol: 5e-3,
            bump: BumpConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct A2Config {
    /// Every center is paired with every radius.
    pub centers: Vec<f64>,
    pub radii: Vec<f64>,
}

impl Default for A2Config {
    fn default() -> Self {
        Self {
            centers: vec![0.0, 0.1, 1.0, 10.0],
            radii: vec![0.01, 0.1, 1.0, 10.0, 100.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelConfig {
    pub sources: Vec<f64>,
    pub times: Vec<f64>,
    pub radii: Vec<f64>,
    pub cosines: Vec<f64>,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            sources: vec![1.0],
            times: vec![0.1, 1.0],
            radii: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            cosines: vec![1.0, 0.5, 0.0, -0.5, -1.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeChoice {
    TwoSided,
    Global,
    Polynomial,
    GaussianRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelSource {
    /// Bessel series; inverse-square and zero potentials only.
    Oracle,
    /// Mode solver with sources and times from `verify.sources`, `verify.times`.
    Solver,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub envelope: EnvelopeChoice,
    pub source: KernelSource,
    pub epsilon: f64,
    pub bracket: (f64, f64),
    /// Number of `(|x|, |y|, t)` triples; each is taken at every angle.
    pub samples: usize,
    pub r_range: (f64, f64),
    pub t_range: (f64, f64),
    pub cosines: Vec<f64>,
    pub sources: Vec<f64>,
    pub times: Vec<f64>,
    pub oracle_l_max: usize,
    /// Also measure the far-field Gaussian rate.
    pub rate: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            envelope: EnvelopeChoice::TwoSided,
            source: KernelSource::Oracle,
            epsilon: 0.5,
            bracket: (1e-8, 1e8),
            samples: 200,
            r_range: (0.05, 20.0),
            t_range: (0.01, 10.0),
            cosines: vec![1.0, 0.923_879_532_511_286_7, std::f64::consts::FRAC_1_SQRT_2, 0.0, -1.0],
            sources: vec![0.5, 1.0, 2.0],
            times: vec![0.1, 1.0],
            oracle_l_max: 4000,
            rate: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SupersolutionConfig {
    pub r_range: (f64, f64),
    pub times: Vec<f64>,
    /// Left end `T` of the time interval on which `ζ` must decrease.
    pub t_start: f64,
    /// Multiplies the computed `κ`; values below 1 should produce violations.
    pub kappa_scale: f64,
    /// `(γ₁, γ₂, c)`; defaults to the choice made from the operator's verdict.
    pub zeta: Option<(f64, f64, f64)>,
}

impl Default for SupersolutionConfig {
    fn default() -> Self {
        Self {
            r_range: (0.2, 20.0),
            times: vec![1.0, 2.0, 5.0, 10.0],
            t_start: 1.0,
            kappa_scale: 1.0,
            zeta: None,
        }
    }
}

/// Flag values that override the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub sets: Vec<String>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub dimension: Option<u32>,
    pub lambda: Option<f64>,
}

pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            text.parse::<toml::Table>()
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => toml::Table::new(),
    };
    for item in &overrides.sets {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects key=value, got `{item}`")))?;
        set_path(&mut table, key.trim(), parse_value(value.trim()))?;
    }
    if let Some(n) = overrides.dimension {
        set_path(&mut table, "potential.dimension", toml::Value::Integer(n.into()))?;
    }
    if let Some(l) = overrides.lambda {
        set_path(&mut table, "potential.lambda", toml::Value::Float(l))?;
        let has_family = table
            .get("potential")
            .and_then(|p| p.as_table())
            .is_some_and(|p| p.contains_key("family"));
        if !has_family {
            set_path(&mut table, "potential.family", toml::Value::String("inverse_square".into()))?;
        }
    }
    if let Some(s) = overrides.seed {
        let s = i64::try_from(s).map_err(|_| CliError::Config(format!("seed {s} too large")))?;
        set_path(&mut table, "seed", toml::Value::Integer(s))?;
    }
    if let Some(d) = &overrides.output_dir {
        set_path(&mut table, "output_dir", toml::Value::String(d.display().to_string()))?;
    }
    table.try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))
}

fn parse_value(text: &str) -> toml::Value {
    format!("v = {text}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(text.to_string()))
}

fn set_path(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<(), CliError> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("malformed key `{key}`")));
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("`{p}` in `{key}` is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// SHA-256 of the canonical JSON form of the resolved config, output directory
/// excluded.
pub fn config_hash(cfg: &RunConfig) -> String {
    let canonical = canonical_json(cfg);
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub fn canonical_json(cfg: &RunConfig) -> String {
    let mut c = cfg.clone();
    c.output_dir = None;
    let value = serde_json::to_value(&c).expect("config serializes");
    value.to_string()
}
