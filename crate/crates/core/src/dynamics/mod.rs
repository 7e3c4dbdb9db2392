//! Classical-field evolution of the two-component polariton equations
//!
//! ```text
//! iħ∂tΨ_s = −(ħ²/2m_s)∂z²Ψ_s + iħη_s∂zΨ_s + ħΩ_0Ψ_s̄ + χ_ss|Ψ_s|²Ψ_s + χ_ss̄|Ψ_s̄|²Ψ_s
//! ```
//!
//! on a periodic grid. The operator equation is replaced by its mean-field
//! limit: quantum noise is dropped and Ψ_s are c-number envelopes normalized
//! to the photon number of each species. Quantum correlations live in
//! [`crate::lattice`].
//!
//! The pre-elimination system, where the antisymmetric field A_s has not yet
//! been adiabatically removed, is integrated by [`pre_elim`].

mod observables;
pub mod pre_elim;
mod split_step;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{OpticalConfig, PolaritonParams, Species};
use crate::units::HBAR;

pub use observables::{measure, rotated_densities, Observables, RotatedDensities};
pub use split_step::{evolve, stability_bound, step, Sample, Stepper, Trajectory};

/// Uniform periodic grid on `[0, L)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub length: f64,
    pub points: usize,
    pub dz: f64,
    /// Angular wavenumbers in FFT order.
    pub k: Vec<f64>,
}

impl Grid1D {
    pub fn new(length: f64, points: usize) -> Result<Self> {
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid needs a power-of-two point count >= 8, got {points}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Config(format!("grid length must be > 0, got {length}")));
        }
        let dz = length / points as f64;
        let dk = 2.0 * PI / length;
        let half = points / 2;
        let k = (0..points)
            .map(|j| if j < half { j as f64 * dk } else { (j as f64 - points as f64) * dk })
            .collect();
        Ok(Grid1D { length, points, dz, k })
    }

    pub fn z(&self, j: usize) -> f64 {
        j as f64 * self.dz
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.z(j)).collect()
    }
}

/// Two-component field on a [`Grid1D`], in units of 1/√m so that
/// ∫|Ψ_s|² dz is the photon number of species `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub psi: [Vec<Complex64>; 2],
    /// Time in seconds.
    pub t: f64,
    pub grid: Grid1D,
}

impl FieldState {
    pub fn new(grid: Grid1D, up: Vec<Complex64>, down: Vec<Complex64>) -> Result<Self> {
        if up.len() != grid.points || down.len() != grid.points {
            return Err(Error::Config(format!(
                "field lengths {}/{} do not match grid of {} points",
                up.len(),
                down.len(),
                grid.points
            )));
        }
        Ok(FieldState { psi: [up, down], t: 0.0, grid })
    }

    pub fn norm(&self, s: Species) -> f64 {
        self.psi[s.index()].iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.dz
    }

    pub fn total_norm(&self) -> f64 {
        self.norm(Species::Up) + self.norm(Species::Down)
    }

    pub fn is_finite(&self) -> bool {
        self.psi.iter().flatten().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Exchange the two species.
    pub fn swapped(&self) -> Self {
        FieldState {
            psi: [self.psi[1].clone(), self.psi[0].clone()],
            t: self.t,
            grid: self.grid.clone(),
        }
    }
}

/// Gaussian pulses `exp(−(z−c)²/4w²)·exp(i k0 z)` with density standard
/// deviation `width`, normalized so that ∫|Ψ_s|² dz = `norms[s]`. Distances
/// are taken to the nearest periodic image of `center`.
pub fn init_gaussian(grid: &Grid1D, center: f64, width: f64, k0: f64, norms: [f64; 2]) -> Result<FieldState> {
    if !(width.is_finite() && width > 2.0 * grid.dz) {
        return Err(Error::Config(format!(
            "Gaussian width {width} is not resolved by spacing {}",
            grid.dz
        )));
    }
    if !(center.is_finite() && (0.0..grid.length).contains(&center)) {
        return Err(Error::Config(format!("center {center} outside [0, {})", grid.length)));
    }
    if norms.iter().any(|n| !(n.is_finite() && *n >= 0.0)) {
        return Err(Error::Config(format!("pulse norms must be >= 0, got {norms:?}")));
    }
    let l = grid.length;
    let shape: Vec<Complex64> = (0..grid.points)
        .map(|j| {
            let z = grid.z(j);
            let mut d = z - center;
            d -= l * (d / l).round();
            Complex64::from_polar((-d * d / (4.0 * width * width)).exp(), k0 * z)
        })
        .collect();
    let raw: f64 = shape.iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.dz;
    let make = |n: f64| {
        let scale = (n / raw).sqrt();
        shape.iter().map(|c| c * scale).collect::<Vec<_>>()
    };
    FieldState::new(grid.clone(), make(norms[0]), make(norms[1]))
}

/// Coefficients of the polariton equation divided by ħ, in SI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsParams {
    /// ħ/(2 m_nr,s), m²/s.
    pub hbar_over_2m: [f64; 2],
    /// η_s, m/s.
    pub eta: [f64; 2],
    /// Ω_0, rad/s.
    #[serde(default)]
    pub omega0: f64,
    /// χ_ss/ħ, m/s.
    #[serde(default)]
    pub g_same: [f64; 2],
    /// χ_{s s̄}/ħ, m/s.
    #[serde(default)]
    pub g_cross: [f64; 2],
    /// Loss coefficient −Im χ̃_ss/ħ ≥ 0, m/s.
    #[serde(default)]
    pub loss_same: [f64; 2],
    /// Loss coefficient −Im χ̃_{s s̄}/ħ ≥ 0, m/s.
    #[serde(default)]
    pub loss_cross: [f64; 2],
}

impl DynamicsParams {
    /// Coefficients for the derived polariton parameters. The loss
    /// coefficients reproduce the rates of [`crate::params::loss_rates`]:
    /// κ_ss = n_ph,s · `loss_same`.
    pub fn from_polariton(p: &PolaritonParams, cfg: &OpticalConfig) -> Self {
        let gamma = cfg.gamma_abs;
        let mut out = DynamicsParams {
            hbar_over_2m: [HBAR / (2.0 * p.m_nr[0]), HBAR / (2.0 * p.m_nr[1])],
            eta: p.eta,
            omega0: p.omega0,
            g_same: [p.chi_same[0] / HBAR, p.chi_same[1] / HBAR],
            g_cross: [p.chi_cross[0] / HBAR, p.chi_cross[1] / HBAR],
            loss_same: [0.0; 2],
            loss_cross: [0.0; 2],
        };
        for s in Species::BOTH {
            let i = s.index();
            let j = s.other().index();
            let ob2 = p.omega_bar[i].powi(2);
            let ds = cfg.delta_same(s) * gamma;
            let dc = cfg.delta_cross(s) * gamma;
            out.loss_same[i] = 8.0 * ob2 * gamma / (cfg.n_z * (4.0 * ds * ds + gamma * gamma));
            out.loss_cross[i] = 4.0 * (2.0 + (p.phi[j] - p.phi[i]).cos()) * ob2 * gamma
                / (cfg.n_z * (4.0 * dc * dc + gamma * gamma));
        }
        out
    }

    /// Species-exchanged coefficients.
    pub fn swapped(&self) -> Self {
        let sw = |a: [f64; 2]| [a[1], a[0]];
        DynamicsParams {
            hbar_over_2m: sw(self.hbar_over_2m),
            eta: sw(self.eta),
            omega0: self.omega0,
            g_same: sw(self.g_same),
            g_cross: sw(self.g_cross),
            loss_same: sw(self.loss_same),
            loss_cross: sw(self.loss_cross),
        }
    }
}

fn default_stride() -> usize {
    1
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSpec {
    /// Time step, s.
    pub dt: f64,
    pub steps: usize,
    /// Observables are recorded every `stride` steps (and at the end).
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default = "default_true")]
    pub include_quadratic: bool,
    #[serde(default)]
    pub include_loss: bool,
    /// Reject `dt` above [`stability_bound`].
    #[serde(default = "default_true")]
    pub enforce_stability: bool,
    /// Keep a copy of the field at every recorded sample.
    #[serde(default)]
    pub keep_snapshots: bool,
}

impl EvolutionSpec {
    pub fn new(dt: f64, steps: usize) -> Self {
        EvolutionSpec {
            dt,
            steps,
            stride: 1,
            include_quadratic: true,
            include_loss: false,
            enforce_stability: true,
            keep_snapshots: false,
        }
    }
}
