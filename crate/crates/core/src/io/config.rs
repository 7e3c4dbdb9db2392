use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::atlas::{AxisSpec, Quantity};
use crate::dynamics::{DynamicsParams, EvolutionSpec};
use crate::error::{Error, Result};
use crate::lattice::{Boundary, EigenMethod, LatticeParams, Sector, DEFAULT_BASIS_CAP};
use crate::params::{OpticalConfig, RegimeThresholds, Species, ZExtent};

pub const SCHEMA_VERSION: u32 = 1;
/// Directory searched for relative config paths that do not exist as given.
pub const CONFIG_DIR_ENV: &str = "THIRRING_CONFIG_DIR";

/// Top-level scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub optical: Option<OpticalConfig>,
    #[serde(default)]
    pub thresholds: RegimeThresholds,
    #[serde(default)]
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub correlation: Option<CorrelationBlock>,
    #[serde(default)]
    pub evolution: Option<EvolutionBlock>,
    #[serde(default)]
    pub lattice: Option<LatticeBlock>,
    /// Seed for randomized checks.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// One axis.
    Line,
    /// Outer product of `x` and `y`.
    Grid,
    /// Λ/(π n_ph) over χ/|η| ∈ (0, π].
    Cutoff,
}

fn default_species() -> Species {
    Species::Up
}

fn default_z_extent() -> ZExtent {
    ZExtent::PerPhoton
}

fn default_cutoff_points() -> usize {
    201
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub kind: SweepKind,
    #[serde(default)]
    pub quantity: Option<Quantity>,
    #[serde(default)]
    pub x: Option<AxisSpec>,
    #[serde(default)]
    pub y: Option<AxisSpec>,
    #[serde(default = "default_species")]
    pub species: Species,
    #[serde(default = "default_z_extent")]
    pub z_extent: ZExtent,
    #[serde(default = "default_cutoff_points")]
    pub cutoff_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NPointBlock {
    pub z: Vec<f64>,
    pub z_prime: Vec<f64>,
    /// Mass scale M, 1/m; defaults to 1/L.
    #[serde(default)]
    pub scale_m: Option<f64>,
}

fn default_series_points() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationBlock {
    /// Taken from the optical block when absent.
    #[serde(default)]
    pub chi_over_eta: Option<f64>,
    /// Taken from the optical block (species up) when absent.
    #[serde(default)]
    pub n_ph: Option<f64>,
    /// Separation range in units of 1/n_ph.
    pub u_min: f64,
    pub u_max: f64,
    #[serde(default = "default_series_points")]
    pub points: usize,
    #[serde(default)]
    pub n_point: Option<NPointBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub points: usize,
    /// Box length, m; defaults to the optical `length`.
    #[serde(default)]
    pub length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseBlock {
    /// Pulse centre, m.
    pub center: f64,
    /// Density standard deviation, m.
    pub width: f64,
    #[serde(default)]
    pub k0: f64,
    /// Photon numbers per species; defaults to the optical `n_photons`.
    #[serde(default)]
    pub norms: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionBlock {
    pub grid: GridBlock,
    pub pulse: PulseBlock,
    pub integrator: EvolutionSpec,
    /// Explicit equation coefficients, replacing those derived from the
    /// optical block.
    #[serde(default)]
    pub coefficients: Option<DynamicsParams>,
}

fn default_u_over_j() -> Vec<f64> {
    vec![1.0, 10.0, 100.0, 1000.0]
}

fn default_cap() -> usize {
    DEFAULT_BASIS_CAP
}

fn default_random_states() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeBlock {
    /// Explicit couplings. When absent they are sampled from the optical
    /// block on `sites` points with `boundary`.
    #[serde(default)]
    pub params: Option<LatticeParams>,
    #[serde(default)]
    pub sites: Option<usize>,
    #[serde(default)]
    pub boundary: Option<Boundary>,
    pub sector: Sector,
    #[serde(default = "default_cap")]
    pub basis_cap: usize,
    #[serde(default)]
    pub method: EigenMethod,
    #[serde(default = "default_u_over_j")]
    pub u_over_j: Vec<f64>,
    #[serde(default = "default_random_states")]
    pub random_states: usize,
}

fn default_identity_tol() -> f64 {
    1e-12
}

fn default_hardcore_tol() -> f64 {
    1e-10
}

fn default_soft_tol() -> f64 {
    1e-3
}

fn default_norm_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_identity_tol")]
    pub identity: f64,
    #[serde(default = "default_hardcore_tol")]
    pub hardcore: f64,
    /// Deviation required at the largest U/J of a fermionization sweep.
    #[serde(default = "default_soft_tol")]
    pub soft_core: f64,
    #[serde(default = "default_norm_tol")]
    pub norm_drift: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: default_identity_tol(),
            hardcore: default_hardcore_tol(),
            soft_core: default_soft_tol(),
            norm_drift: default_norm_tol(),
        }
    }
}

impl ScenarioConfig {
    /// Parse a JSON document. Unknown keys and type errors report the path
    /// of the offending value.
    pub fn from_json_value(value: Value) -> Result<Self> {
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." {
                Error::Config(inner.to_string())
            } else {
                Error::Config(format!("{path}: {inner}"))
            }
        })?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        if let Some(opt) = &cfg.optical {
            if let Err(e) = opt.validate() {
                return Err(match e {
                    Error::Config(m) => Error::Config(format!("optical: {m}")),
                    other => other,
                });
            }
        }
        Ok(cfg)
    }

    pub fn from_json_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut value: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed JSON: {e}")))?;
        apply_overrides(&mut value, overrides)?;
        ScenarioConfig::from_json_value(value)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let resolved = resolve_config_path(path);
        let text = std::fs::read_to_string(&resolved).map_err(|e| Error::io(&resolved, e))?;
        ScenarioConfig::from_json_str(&text, overrides)
    }

    pub fn optical(&self) -> Result<&OpticalConfig> {
        self.optical.as_ref().ok_or_else(|| Error::Config("missing block `optical`".into()))
    }

    /// SHA-256 of the canonical serialized form.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let bytes = serde_json::to_vec(self).expect("config serializes");
        crate::atlas::hex(&Sha256::digest(&bytes))
    }
}

/// `path` as given if it exists or is absolute, else under
/// `$THIRRING_CONFIG_DIR` when that is set.
pub fn resolve_config_path(path: &Path) -> PathBuf {
    if path.is_absolute() || path.exists() {
        return path.to_path_buf();
    }
    match std::env::var_os(CONFIG_DIR_ENV) {
        Some(dir) => Path::new(&dir).join(path),
        None => path.to_path_buf(),
    }
}

/// Apply `key.sub.key=value` overrides. Values parse as JSON when possible
/// and as plain strings otherwise; missing objects along the path are
/// created and numeric segments index arrays.
pub fn apply_overrides(root: &mut Value, overrides: &[String]) -> Result<()> {
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{item}` is not of the form key=value")))?;
        if key.is_empty() {
            return Err(Error::Config(format!("override `{item}` has an empty key")));
        }
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut cur = &mut *root;
        let parts: Vec<&str> = key.split('.').collect();
        for (n, part) in parts.iter().enumerate() {
            let last = n + 1 == parts.len();
            cur = match cur {
                Value::Array(items) => {
                    let idx: usize = part
                        .parse()
                        .map_err(|_| Error::Config(format!("override `{key}`: `{part}` is not an array index")))?;
                    let len = items.len();
                    items.get_mut(idx).ok_or_else(|| {
                        Error::Config(format!("override `{key}`: index {idx} out of range (length {len})"))
                    })?
                }
                Value::Object(map) => map.entry(part.to_string()).or_insert_with(|| {
                    if last {
                        Value::Null
                    } else {
                        Value::Object(Default::default())
                    }
                }),
                Value::Null => {
                    *cur = Value::Object(Default::default());
                    match cur {
                        Value::Object(map) => map.entry(part.to_string()).or_insert(Value::Object(Default::default())),
                        _ => unreachable!(),
                    }
                }
                _ => return Err(Error::Config(format!("override `{key}`: `{part}` descends into a scalar"))),
            };
        }
        *cur = value;
    }
    Ok(())
}
