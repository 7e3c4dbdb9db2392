//! Parameter sweeps over the optical configuration, producing plot-ready
//! grids of derived quantities.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::correlations::{CorrelationSeries, FormulaTag, SeparationUnit};
use crate::error::{Error, Result};
use crate::params::{
    self, derive_params, Channel, OpticalConfig, Regime, RegimeThresholds, Species, ZExtent,
};

/// Scalar field of [`OpticalConfig`] addressed by a dotted path such as
/// `delta_ss.up.down`, `omega_plus.both` or `n_z`.
///
/// `delta_ss.same` and `delta_ss.cross` address both diagonal or both
/// off-diagonal entries at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamPath {
    OmegaPlus(Target),
    OmegaMinus(Target),
    Delta(Target),
    DeltaSs(Species, Species),
    DeltaSame,
    DeltaCross,
    Omega0,
    GammaAbs,
    NZ,
    G2nz,
    VsDirect(Target),
    VEmpty,
    NPh(Target),
    Length,
    NPhotons(Target),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    One(Species),
    Both,
}

impl Target {
    fn apply(self, arr: &mut [f64; 2], value: f64) {
        match self {
            Target::One(s) => arr[s.index()] = value,
            Target::Both => *arr = [value, value],
        }
    }
}

fn parse_species(s: &str) -> Option<Species> {
    match s {
        "up" => Some(Species::Up),
        "down" => Some(Species::Down),
        _ => None,
    }
}

fn parse_target(s: &str) -> Option<Target> {
    if s == "both" {
        Some(Target::Both)
    } else {
        parse_species(s).map(Target::One)
    }
}

impl FromStr for ParamPath {
    type Err = Error;

    fn from_str(path: &str) -> Result<Self> {
        let parts: Vec<&str> = path.split('.').collect();
        let bad = || Error::Config(format!("unknown sweep parameter path `{path}`"));
        let target = |i: usize| parts.get(i).and_then(|p| parse_target(p)).ok_or_else(bad);
        let parsed = match parts[0] {
            "omega_plus" => ParamPath::OmegaPlus(target(1)?),
            "omega_minus" => ParamPath::OmegaMinus(target(1)?),
            "delta" => ParamPath::Delta(target(1)?),
            "delta_ss" => match parts.get(1).copied() {
                Some("same") => ParamPath::DeltaSame,
                Some("cross") => ParamPath::DeltaCross,
                Some(a) => {
                    let a = parse_species(a).ok_or_else(bad)?;
                    let b = parts.get(2).and_then(|p| parse_species(p)).ok_or_else(bad)?;
                    if parts.len() != 3 {
                        return Err(bad());
                    }
                    ParamPath::DeltaSs(a, b)
                }
                None => return Err(bad()),
            },
            "omega0" => ParamPath::Omega0,
            "gamma_abs" => ParamPath::GammaAbs,
            "n_z" => ParamPath::NZ,
            "g2nz" => ParamPath::G2nz,
            "v_s_direct" => ParamPath::VsDirect(target(1)?),
            "v_empty" => ParamPath::VEmpty,
            "n_ph" => ParamPath::NPh(target(1)?),
            "length" => ParamPath::Length,
            "n_photons" => ParamPath::NPhotons(target(1)?),
            _ => return Err(bad()),
        };
        let expected_len = match parsed {
            ParamPath::DeltaSs(..) => 3,
            ParamPath::OmegaPlus(_)
            | ParamPath::OmegaMinus(_)
            | ParamPath::Delta(_)
            | ParamPath::DeltaSame
            | ParamPath::DeltaCross
            | ParamPath::VsDirect(_)
            | ParamPath::NPh(_)
            | ParamPath::NPhotons(_) => 2,
            _ => 1,
        };
        if parts.len() != expected_len {
            return Err(bad());
        }
        Ok(parsed)
    }
}

impl ParamPath {
    pub fn set(self, cfg: &mut OpticalConfig, value: f64) -> Result<()> {
        match self {
            ParamPath::OmegaPlus(t) => t.apply(&mut cfg.omega_plus, value),
            ParamPath::OmegaMinus(t) => t.apply(&mut cfg.omega_minus, value),
            ParamPath::Delta(t) => t.apply(&mut cfg.delta, value),
            ParamPath::DeltaSs(a, b) => cfg.delta_ss[a.index()][b.index()] = value,
            ParamPath::DeltaSame => {
                cfg.delta_ss[0][0] = value;
                cfg.delta_ss[1][1] = value;
            }
            ParamPath::DeltaCross => {
                cfg.delta_ss[0][1] = value;
                cfg.delta_ss[1][0] = value;
            }
            ParamPath::Omega0 => cfg.omega0 = value,
            ParamPath::GammaAbs => cfg.gamma_abs = value,
            ParamPath::NZ => cfg.n_z = value,
            ParamPath::G2nz => {
                if cfg.g2nz.is_none() {
                    return Err(Error::Config(
                        "cannot sweep `g2nz` on a config that sets `v_s_direct`".into(),
                    ));
                }
                cfg.g2nz = Some(value);
            }
            ParamPath::VsDirect(t) => match cfg.v_s_direct.as_mut() {
                Some(v) => t.apply(v, value),
                None => {
                    return Err(Error::Config(
                        "cannot sweep `v_s_direct` on a config that sets `g2nz`".into(),
                    ))
                }
            },
            ParamPath::VEmpty => cfg.v_empty = value,
            ParamPath::NPh(t) => t.apply(&mut cfg.n_ph, value),
            ParamPath::Length => cfg.length = value,
            ParamPath::NPhotons(t) => t.apply(&mut cfg.n_photons, value),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub path: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl AxisSpec {
    pub fn new(path: &str, start: f64, stop: f64, points: usize, spacing: Spacing) -> Self {
        AxisSpec { path: path.to_string(), start, stop, points, spacing }
    }

    pub fn validate(&self) -> Result<ParamPath> {
        let path: ParamPath = self.path.parse()?;
        if self.points < 2 {
            return Err(Error::Config(format!(
                "axis `{}` needs at least 2 points, got {}",
                self.path, self.points
            )));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start == self.stop {
            return Err(Error::Config(format!(
                "axis `{}` needs distinct finite endpoints",
                self.path
            )));
        }
        if self.spacing == Spacing::Log
            && (self.start == 0.0 || self.stop == 0.0 || self.start.signum() != self.stop.signum())
        {
            return Err(Error::Config(format!(
                "log axis `{}` needs same-sign nonzero endpoints",
                self.path
            )));
        }
        Ok(path)
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        let last = (n - 1) as f64;
        match self.spacing {
            Spacing::Linear => (0..n)
                .map(|i| {
                    if i == n - 1 {
                        self.stop
                    } else {
                        self.start + (self.stop - self.start) * i as f64 / last
                    }
                })
                .collect(),
            Spacing::Log => {
                let sign = self.start.signum();
                let (a, b) = (self.start.abs().ln(), self.stop.abs().ln());
                (0..n)
                    .map(|i| {
                        if i == 0 {
                            self.start
                        } else if i == n - 1 {
                            self.stop
                        } else {
                            sign * (a + (b - a) * i as f64 / last).exp()
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Quantity evaluated at each grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// χ_{s s̄}/χ_ss.
    InteractionRatio,
    /// β_ss^i = χ_ss/(ħ|η_s|).
    BetaSame,
    /// β_{s s̄}^i = χ_{s s̄}/(ħ|η_s|).
    BetaCross,
    /// β_s^k.
    BetaKinetic,
    /// Λ/(π n_ph,s) at the Thirring coupling χ/(ħ|η|).
    Cutoff,
    /// Total loss rate κ, 1/s.
    Loss,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::InteractionRatio => "interaction_ratio",
            Quantity::BetaSame => "beta_same",
            Quantity::BetaCross => "beta_cross",
            Quantity::BetaKinetic => "beta_kinetic",
            Quantity::Cutoff => "cutoff",
            Quantity::Loss => "loss",
        }
    }

    pub fn units(self) -> &'static str {
        match self {
            Quantity::Loss => "1/s",
            _ => "dimensionless",
        }
    }
}

/// Why a cell carries no value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Singularity {
    ZeroDetuning,
    BalancedField,
    OutOfDomain,
    InvalidConfig,
    NonFinite,
}

impl Singularity {
    pub fn code(self) -> &'static str {
        match self {
            Singularity::ZeroDetuning => "zero_detuning",
            Singularity::BalancedField => "balanced_field",
            Singularity::OutOfDomain => "out_of_domain",
            Singularity::InvalidConfig => "invalid_config",
            Singularity::NonFinite => "non_finite",
        }
    }

    fn from_error(e: &Error) -> Self {
        match e {
            Error::ZeroDetuning { .. } => Singularity::ZeroDetuning,
            Error::BalancedField { .. } => Singularity::BalancedField,
            Error::Domain(_) => Singularity::OutOfDomain,
            _ => Singularity::InvalidConfig,
        }
    }
}

impl fmt::Display for Singularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: AxisSpec,
    pub base: OpticalConfig,
    pub quantity: Quantity,
    #[serde(default = "default_species")]
    pub species: Species,
    #[serde(default = "default_z_extent")]
    pub z_extent: ZExtent,
    #[serde(default)]
    pub thresholds: RegimeThresholds,
}

fn default_species() -> Species {
    Species::Up
}

fn default_z_extent() -> ZExtent {
    ZExtent::PerPhoton
}

/// One cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub value: Option<f64>,
    pub singular: Option<Singularity>,
    pub regime: Option<Regime>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub path: String,
    pub spacing: Spacing,
    pub values: Vec<f64>,
}

/// Immutable sweep output. For two axes, cell `(ix, iy)` is stored at
/// `ix * ny + iy`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub axes: Vec<GridAxis>,
    pub cells: Vec<Cell>,
    pub quantity: Quantity,
    pub species: Species,
    pub units: String,
    pub base_digest: String,
}

impl GridResult {
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.values.len()).collect()
    }

    pub fn value(&self, ix: usize, iy: usize) -> Option<f64> {
        let ny = self.axes.get(1).map_or(1, |a| a.values.len());
        self.cells[ix * ny + iy].value
    }
}

/// SHA-256 of the canonical JSON form of a config.
pub fn config_digest(cfg: &OpticalConfig) -> String {
    let json = serde_json::to_vec(cfg).expect("config serializes");
    hex(&Sha256::digest(&json))
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

struct Evaluator<'a> {
    quantity: Quantity,
    species: Species,
    z_extent: ZExtent,
    thresholds: &'a RegimeThresholds,
}

impl Evaluator<'_> {
    fn eval(&self, cfg: &OpticalConfig) -> Cell {
        let p = match derive_params(cfg) {
            Ok(p) => p,
            Err(e) => {
                return Cell { value: None, singular: Some(Singularity::from_error(&e)), regime: None }
            }
        };
        let i = self.species.index();
        let value: Result<f64> = match self.quantity {
            Quantity::InteractionRatio => params::interaction_ratio(&p).map(|r| r[i]),
            Quantity::BetaSame => params::interaction_to_kinetic(&p, Channel::Same).map(|r| r[i]),
            Quantity::BetaCross => params::interaction_to_kinetic(&p, Channel::Cross).map(|r| r[i]),
            Quantity::BetaKinetic => self
                .z_extent
                .resolve(cfg, self.species)
                .and_then(|z| params::kinetic_ratio(&p, z))
                .map(|r| r[i]),
            Quantity::Cutoff => p
                .chi_over_eta()
                .and_then(|x| params::momentum_cutoff(x.abs(), cfg.n_ph[i]))
                .map(|l| l / (PI * cfg.n_ph[i])),
            Quantity::Loss => params::loss_rates(cfg).map(|l| l.kappa_total),
        };
        let regime = params::classify_regime(&p, self.thresholds).ok();
        match value {
            Ok(v) if v.is_finite() => Cell { value: Some(v), singular: None, regime },
            Ok(_) => Cell { value: None, singular: Some(Singularity::NonFinite), regime },
            Err(e) => Cell { value: None, singular: Some(Singularity::from_error(&e)), regime },
        }
    }
}

fn finish(
    axes: Vec<GridAxis>,
    cells: Vec<Cell>,
    quantity: Quantity,
    species: Species,
    base: &OpticalConfig,
) -> Result<GridResult> {
    if cells.iter().all(|c| c.value.is_none()) {
        return Err(Error::Domain(format!(
            "every cell of the {} sweep is singular",
            quantity.name()
        )));
    }
    Ok(GridResult {
        axes,
        cells,
        quantity,
        species,
        units: quantity.units().to_string(),
        base_digest: config_digest(base),
    })
}

/// Evaluate the selected quantity along one axis. Singular cells are flagged.
pub fn sweep_1d(spec: &SweepSpec) -> Result<GridResult> {
    let path = spec.axis.validate()?;
    let xs = spec.axis.values();
    let ev = Evaluator {
        quantity: spec.quantity,
        species: spec.species,
        z_extent: spec.z_extent,
        thresholds: &spec.thresholds,
    };
    // Check the path is settable on this base before fanning out.
    path.set(&mut spec.base.clone(), xs[0])?;
    let cells: Vec<Cell> = xs
        .par_iter()
        .map(|&x| {
            let mut cfg = spec.base.clone();
            path.set(&mut cfg, x).expect("checked above");
            ev.eval(&cfg)
        })
        .collect();
    let axes = vec![GridAxis { path: spec.axis.path.clone(), spacing: spec.axis.spacing, values: xs }];
    finish(axes, cells, spec.quantity, spec.species, &spec.base)
}

/// Full outer-product grid over two axes, with a regime label per cell.
#[allow(clippy::too_many_arguments)]
pub fn sweep_2d(
    x: &AxisSpec,
    y: &AxisSpec,
    base: &OpticalConfig,
    quantity: Quantity,
    species: Species,
    z_extent: ZExtent,
    thresholds: &RegimeThresholds,
) -> Result<GridResult> {
    let px = x.validate()?;
    let py = y.validate()?;
    if px == py || x.path == y.path {
        return Err(Error::Config(format!("2D sweep needs distinct axes, got `{}` twice", x.path)));
    }
    let xs = x.values();
    let ys = y.values();
    {
        let mut probe = base.clone();
        px.set(&mut probe, xs[0])?;
        py.set(&mut probe, ys[0])?;
    }
    let ev = Evaluator { quantity, species, z_extent, thresholds };
    let ny = ys.len();
    let cells: Vec<Cell> = (0..xs.len() * ny)
        .into_par_iter()
        .map(|k| {
            let mut cfg = base.clone();
            px.set(&mut cfg, xs[k / ny]).expect("checked above");
            py.set(&mut cfg, ys[k % ny]).expect("checked above");
            ev.eval(&cfg)
        })
        .collect();
    let axes = vec![
        GridAxis { path: x.path.clone(), spacing: x.spacing, values: xs },
        GridAxis { path: y.path.clone(), spacing: y.spacing, values: ys },
    ];
    finish(axes, cells, quantity, species, base)
}

/// Λ/(π n_ph) on an even grid of χ/|η| over (0, π]. The first abscissa is
/// the smallest positive double, standing in for the 0⁺ limit.
pub fn sweep_cutoff(n_points: usize, n_ph: f64) -> Result<CorrelationSeries> {
    if n_points < 2 {
        return Err(Error::Config(format!("cutoff sweep needs at least 2 points, got {n_points}")));
    }
    let last = (n_points - 1) as f64;
    let xs: Vec<f64> = (0..n_points)
        .map(|i| match i {
            0 => f64::MIN_POSITIVE,
            i if i == n_points - 1 => PI,
            i => PI * i as f64 / last,
        })
        .collect();
    let values = xs
        .iter()
        .map(|&x| params::momentum_cutoff(x, n_ph).map(|l| l / (PI * n_ph)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrelationSeries {
        separations: xs,
        values,
        unit: SeparationUnit::ChiOverEta,
        chi_over_eta: None,
        cutoff: None,
        scale_m: None,
        n_ph,
        formula: FormulaTag::MomentumCutoff,
    })
}
