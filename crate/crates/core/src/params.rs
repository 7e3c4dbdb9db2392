//! Closed-form map from optical control parameters to the effective
//! Thirring-model couplings.
//!
//! Frequency-like inputs ([`OpticalConfig`]) are given as multiples of the
//! atomic linewidth Γ. [`derive_params`] converts them to rad/s exactly once,
//! and every quantity in [`PolaritonParams`] is SI.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{HBAR, RB_D2_LINEWIDTH, SPEED_OF_LIGHT};

/// Photon polarization, playing the role of the Thirring spin label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    Up,
    Down,
}

impl Species {
    pub const BOTH: [Species; 2] = [Species::Up, Species::Down];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Species::Up => 0,
            Species::Down => 1,
        }
    }

    /// The opposite polarization, s̄.
    #[inline]
    pub fn other(self) -> Species {
        match self {
            Species::Up => Species::Down,
            Species::Down => Species::Up,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Species::Up => "up",
            Species::Down => "down",
        }
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn default_gamma_abs() -> f64 {
    RB_D2_LINEWIDTH
}

fn default_gamma_1d_frac() -> f64 {
    0.2
}

fn default_v_empty() -> f64 {
    SPEED_OF_LIGHT
}

/// Raw experimental knobs. Per-species arrays are ordered `[up, down]`;
/// `delta_ss[s][s']` is Δ_{ss'}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpticalConfig {
    /// Ω_{s,+} in units of Γ.
    pub omega_plus: [f64; 2],
    /// Ω_{s,−} in units of Γ.
    pub omega_minus: [f64; 2],
    /// One-photon detunings Δ_s in units of Γ.
    pub delta: [f64; 2],
    /// Two-photon-level detunings Δ_{ss'} in units of Γ.
    pub delta_ss: [[f64; 2]; 2],
    /// Connecting-laser Rabi frequency Ω_0 in units of Γ.
    #[serde(default)]
    pub omega0: f64,
    /// Absolute linewidth Γ in rad/s.
    #[serde(default = "default_gamma_abs")]
    pub gamma_abs: f64,
    /// Γ_1D/Γ. Carried as metadata only.
    #[serde(default = "default_gamma_1d_frac")]
    pub gamma_1d_frac: f64,
    /// Linear atomic density n_z, 1/m.
    pub n_z: f64,
    /// Collective coupling g²n_z in units of Γ².
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g2nz: Option<f64>,
    /// Reduced group velocities v_s in m/s, as an alternative to `g2nz`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_s_direct: Option<[f64; 2]>,
    /// Light speed in the empty medium, m/s.
    #[serde(default = "default_v_empty")]
    pub v_empty: f64,
    /// Photonic linear densities n_ph,s, 1/m.
    pub n_ph: [f64; 2],
    /// Medium length L, m.
    pub length: f64,
    /// Photon numbers N_ph,s.
    pub n_photons: [f64; 2],
}

/// Control-field pair (Ω_+, Ω_−) with the requested mean Ω̄ and cos 2φ.
pub fn rabi_pair(omega_bar: f64, cos_2phi: f64) -> (f64, f64) {
    let sum_sq = 2.0 * omega_bar * omega_bar;
    let plus_sq = sum_sq * (1.0 + cos_2phi) / 2.0;
    let minus_sq = sum_sq * (1.0 - cos_2phi) / 2.0;
    (plus_sq.sqrt(), minus_sq.sqrt())
}

impl OpticalConfig {
    /// Typical slow-light operating point: |cos 2φ| = 0.004 with opposite
    /// signs for the two species, Ω̄ = 1.5Γ, v_s = 100 m/s, n_z = 10⁷ m⁻¹,
    /// n_ph = 10³ m⁻¹, a 1 cm medium holding 10 photons per species,
    /// Δ_s = 0.05Γ and all Δ_{ss'} = 4Γ.
    pub fn slow_light_reference() -> Self {
        let (up_p, up_m) = rabi_pair(1.5, 0.004);
        let (dn_p, dn_m) = rabi_pair(1.5, -0.004);
        OpticalConfig {
            omega_plus: [up_p, dn_p],
            omega_minus: [up_m, dn_m],
            delta: [0.05, 0.05],
            delta_ss: [[4.0, 4.0], [4.0, 4.0]],
            omega0: 0.0,
            gamma_abs: RB_D2_LINEWIDTH,
            gamma_1d_frac: 0.2,
            n_z: 1e7,
            g2nz: None,
            v_s_direct: Some([100.0, 100.0]),
            v_empty: SPEED_OF_LIGHT,
            n_ph: [1e3, 1e3],
            length: 0.01,
            n_photons: [10.0, 10.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for s in Species::BOTH {
            let i = s.index();
            positive(self.omega_plus[i], &format!("omega_plus.{s}"))?;
            positive(self.omega_minus[i], &format!("omega_minus.{s}"))?;
            nonzero_detuning(self.delta[i], &format!("delta.{s}"))?;
            for t in Species::BOTH {
                nonzero_detuning(self.delta_ss[i][t.index()], &format!("delta_ss.{s}.{t}"))?;
            }
            positive(self.n_ph[i], &format!("n_ph.{s}"))?;
            finite_nonneg(self.n_photons[i], &format!("n_photons.{s}"))?;
        }
        finite_nonneg(self.omega0, "omega0")?;
        positive(self.gamma_abs, "gamma_abs")?;
        finite_nonneg(self.gamma_1d_frac, "gamma_1d_frac")?;
        positive(self.n_z, "n_z")?;
        positive(self.v_empty, "v_empty")?;
        positive(self.length, "length")?;
        match (self.g2nz, self.v_s_direct) {
            (Some(g), None) => positive(g, "g2nz"),
            (None, Some(v)) => {
                positive(v[0], "v_s_direct.up")?;
                positive(v[1], "v_s_direct.down")
            }
            (Some(_), Some(_)) => Err(Error::Config(
                "exactly one of `g2nz` and `v_s_direct` may be set, found both".into(),
            )),
            (None, None) => Err(Error::Config(
                "exactly one of `g2nz` and `v_s_direct` must be set, found neither".into(),
            )),
        }
    }

    /// Δ_{s s̄} for species `s`.
    #[inline]
    pub fn delta_cross(&self, s: Species) -> f64 {
        self.delta_ss[s.index()][s.other().index()]
    }

    /// Δ_{ss} for species `s`.
    #[inline]
    pub fn delta_same(&self, s: Species) -> f64 {
        self.delta_ss[s.index()][s.index()]
    }
}

fn positive(x: f64, field: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("`{field}` must be finite and > 0, got {x}")))
    }
}

fn finite_nonneg(x: f64, field: &str) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("`{field}` must be finite and >= 0, got {x}")))
    }
}

fn nonzero_detuning(x: f64, field: &str) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Config(format!("`{field}` must be finite, got {x}")));
    }
    if x == 0.0 {
        return Err(Error::ZeroDetuning { field: field.to_string() });
    }
    Ok(())
}

/// Effective field-theory quantities in SI units. Per-species arrays are
/// ordered `[up, down]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolaritonParams {
    /// Mixing angle φ_s, rad.
    pub phi: [f64; 2],
    /// Angle θ_s with tan²θ_s = g²n_z/Ω̄_s², rad.
    pub theta: [f64; 2],
    /// tan²θ_s, kept explicitly because θ_s sits close to π/2.
    pub tan2_theta: [f64; 2],
    /// cos 2φ_s evaluated from the Rabi frequencies without trig round-off.
    pub cos_2phi: [f64; 2],
    /// sin 2φ_s, likewise.
    pub sin_2phi: [f64; 2],
    /// Ω̄_s in rad/s.
    pub omega_bar: [f64; 2],
    pub alpha_plus: [f64; 2],
    pub alpha_minus: [f64; 2],
    /// Reduced group velocity v_s, m/s.
    pub v: [f64; 2],
    /// Dirac velocity η_s = −2 v_s cos 2φ_s, m/s.
    pub eta: [f64; 2],
    /// Non-relativistic polariton mass m_nr,s, kg (sign follows −Δ_s).
    pub m_nr: [f64; 2],
    /// Relativistic mass m_0,s = −ħΩ_0/η_s², kg; `None` for balanced fields.
    pub m_0: [Option<f64>; 2],
    /// χ_ss, J·m.
    pub chi_same: [f64; 2],
    /// χ_{s s̄}, J·m.
    pub chi_cross: [f64; 2],
    /// Thirring coupling χ = 2χ_{↑↓} after symmetrizing χ_{↑↓} and χ_{↓↑}.
    pub chi_tm: f64,
    /// Ω_0 in rad/s.
    pub omega0: f64,
    /// Δ_s in rad/s.
    pub delta: [f64; 2],
}

impl PolaritonParams {
    /// Relativistic rest mass; fails for balanced control fields.
    pub fn rest_mass(&self, s: Species) -> Result<f64> {
        self.m_0[s.index()].ok_or(Error::BalancedField { species: s.name() })
    }

    /// |η_s|, failing when the species has balanced control fields.
    pub fn abs_eta(&self, s: Species) -> Result<f64> {
        let eta = self.eta[s.index()].abs();
        if eta == 0.0 {
            Err(Error::BalancedField { species: s.name() })
        } else {
            Ok(eta)
        }
    }

    /// Dimensionless Thirring coupling χ/(ħ|η|), using the mean of |η_↑| and
    /// |η_↓|.
    pub fn chi_over_eta(&self) -> Result<f64> {
        let eta = 0.5 * (self.abs_eta(Species::Up)? + self.abs_eta(Species::Down)?);
        Ok(self.chi_tm / (HBAR * eta))
    }
}

/// Evaluate every derived quantity for a validated configuration.
pub fn derive_params(cfg: &OpticalConfig) -> Result<PolaritonParams> {
    cfg.validate()?;
    let gamma = cfg.gamma_abs;

    let mut p = PolaritonParams {
        phi: [0.0; 2],
        theta: [0.0; 2],
        tan2_theta: [0.0; 2],
        cos_2phi: [0.0; 2],
        sin_2phi: [0.0; 2],
        omega_bar: [0.0; 2],
        alpha_plus: [0.0; 2],
        alpha_minus: [0.0; 2],
        v: [0.0; 2],
        eta: [0.0; 2],
        m_nr: [0.0; 2],
        m_0: [None; 2],
        chi_same: [0.0; 2],
        chi_cross: [0.0; 2],
        chi_tm: 0.0,
        omega0: cfg.omega0 * gamma,
        delta: [cfg.delta[0] * gamma, cfg.delta[1] * gamma],
    };

    for s in Species::BOTH {
        let i = s.index();
        let plus_sq = cfg.omega_plus[i].powi(2);
        let minus_sq = cfg.omega_minus[i].powi(2);
        let sum_sq = plus_sq + minus_sq;
        let omega_bar_sq_gamma = sum_sq / 2.0;

        p.phi[i] = cfg.omega_minus[i].atan2(cfg.omega_plus[i]);
        p.alpha_plus[i] = plus_sq / sum_sq;
        p.alpha_minus[i] = minus_sq / sum_sq;
        p.cos_2phi[i] = (plus_sq - minus_sq) / sum_sq;
        p.sin_2phi[i] = 2.0 * cfg.omega_plus[i] * cfg.omega_minus[i] / sum_sq;
        p.omega_bar[i] = omega_bar_sq_gamma.sqrt() * gamma;

        let (tan2_theta, v_s) = match (cfg.g2nz, cfg.v_s_direct) {
            (Some(g2nz), _) => {
                let t = g2nz / omega_bar_sq_gamma;
                (t, cfg.v_empty / (PI * t))
            }
            (None, Some(v)) => (cfg.v_empty / (PI * v[i]), v[i]),
            (None, None) => unreachable!("validated above"),
        };
        p.tan2_theta[i] = tan2_theta;
        p.theta[i] = tan2_theta.sqrt().atan();
        p.v[i] = v_s;
        p.eta[i] = -2.0 * v_s * p.cos_2phi[i];

        let omega_bar_sq = p.omega_bar[i].powi(2);
        p.m_nr[i] = -HBAR * omega_bar_sq / (4.0 * p.sin_2phi[i].powi(2) * v_s * v_s * p.delta[i]);
        p.m_0[i] = if p.eta[i] == 0.0 {
            None
        } else {
            Some(-HBAR * p.omega0 / p.eta[i].powi(2))
        };
    }

    for s in Species::BOTH {
        let i = s.index();
        let j = s.other().index();
        let omega_bar_sq = p.omega_bar[i].powi(2);
        let d_same = cfg.delta_same(s) * gamma;
        let d_cross = cfg.delta_cross(s) * gamma;
        p.chi_same[i] = 4.0 * HBAR * omega_bar_sq / (d_same * cfg.n_z);
        p.chi_cross[i] =
            2.0 * HBAR * omega_bar_sq * (2.0 + (p.phi[j] - p.phi[i]).cos()) / (d_cross * cfg.n_z);
    }

    let (up_down, down_up) = (p.chi_cross[0], p.chi_cross[1]);
    if (up_down - down_up).abs() > 1e-12 * up_down.abs().max(down_up.abs()) {
        log::warn!(
            "chi_up_down ({up_down:e}) != chi_down_up ({down_up:e}); using their mean for the Thirring coupling"
        );
    }
    p.chi_tm = up_down + down_up;

    Ok(p)
}

/// χ_{s s̄}/χ_ss for both species.
pub fn interaction_ratio(p: &PolaritonParams) -> Result<[f64; 2]> {
    let mut out = [0.0; 2];
    for s in Species::BOTH {
        let i = s.index();
        if p.chi_same[i] == 0.0 {
            return Err(Error::Domain(format!("chi_same.{s} is zero")));
        }
        out[i] = p.chi_cross[i] / p.chi_same[i];
    }
    Ok(out)
}

/// Ratio β_s^k of quadratic to linear kinetic energy for a pulse of spatial
/// extent `z_extent` (m).
pub fn kinetic_ratio(p: &PolaritonParams, z_extent: f64) -> Result<[f64; 2]> {
    if !(z_extent.is_finite() && z_extent > 0.0) {
        return Err(Error::Domain(format!("z_extent must be > 0, got {z_extent}")));
    }
    let mut out = [0.0; 2];
    for s in Species::BOTH {
        let i = s.index();
        let cos = p.cos_2phi[i].abs();
        if cos == 0.0 {
            return Err(Error::BalancedField { species: s.name() });
        }
        out[i] = p.sin_2phi[i].powi(2) * p.v[i] * p.delta[i].abs()
            / (cos * z_extent * p.omega_bar[i].powi(2));
    }
    Ok(out)
}

/// Pulse extent used for the kinetic-energy estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ZExtent {
    /// Whole medium, z_s = L (weakly interacting pulse).
    Length,
    /// z_s = L/N_ph,s (Tonks regime). Uses the up-species photon number.
    PerPhoton,
    /// Explicit extent in metres.
    Fixed(f64),
}

impl ZExtent {
    pub fn resolve(self, cfg: &OpticalConfig, s: Species) -> Result<f64> {
        match self {
            ZExtent::Length => Ok(cfg.length),
            ZExtent::PerPhoton => {
                let n = cfg.n_photons[s.index()];
                if n > 0.0 {
                    Ok(cfg.length / n)
                } else {
                    Err(Error::Domain(format!("n_photons.{s} must be > 0 for the per-photon extent")))
                }
            }
            ZExtent::Fixed(z) => Ok(z),
        }
    }
}

/// Same- or cross-species channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Same,
    Cross,
}

/// β^i = χ/(ħ|η_s|) for the requested channel, both species.
pub fn interaction_to_kinetic(p: &PolaritonParams, which: Channel) -> Result<[f64; 2]> {
    let mut out = [0.0; 2];
    for s in Species::BOTH {
        let i = s.index();
        let eta = p.abs_eta(s)?;
        let chi = match which {
            Channel::Same => p.chi_same[i],
            Channel::Cross => p.chi_cross[i],
        };
        out[i] = chi / (HBAR * eta);
    }
    Ok(out)
}

/// sin(x)/x with its continuous value at 0.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Momentum cutoff Λ = π n_ph sin(x)/x for x = χ/|η| ∈ [0, π] (1/m). The
/// value at 0 is the continuous extension π n_ph.
pub fn momentum_cutoff(chi_over_eta: f64, n_ph: f64) -> Result<f64> {
    if !(chi_over_eta.is_finite() && (0.0..=PI).contains(&chi_over_eta)) {
        return Err(Error::Domain(format!(
            "chi/|eta| must lie in (0, pi], got {chi_over_eta}"
        )));
    }
    if !(n_ph.is_finite() && n_ph > 0.0) {
        return Err(Error::Domain(format!("n_ph must be > 0, got {n_ph}")));
    }
    Ok(PI * n_ph * sinc(chi_over_eta))
}

/// Interaction-induced loss rates in 1/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossRates {
    pub kappa_same: [f64; 2],
    pub kappa_cross: [f64; 2],
    pub kappa_total: f64,
    /// 1/κ in seconds; `None` when κ vanishes.
    pub coherence_time: Option<f64>,
}

/// Spontaneous-emission loss estimate from the imaginary parts of the
/// interaction couplings.
pub fn loss_rates(cfg: &OpticalConfig) -> Result<LossRates> {
    cfg.validate()?;
    let gamma = cfg.gamma_abs;
    let phi = [
        cfg.omega_minus[0].atan2(cfg.omega_plus[0]),
        cfg.omega_minus[1].atan2(cfg.omega_plus[1]),
    ];
    let mut out = LossRates {
        kappa_same: [0.0; 2],
        kappa_cross: [0.0; 2],
        kappa_total: 0.0,
        coherence_time: None,
    };
    for s in Species::BOTH {
        let i = s.index();
        let j = s.other().index();
        // Everything in units of Γ; the final rate is scaled by Γ once.
        let omega_bar_sq = (cfg.omega_plus[i].powi(2) + cfg.omega_minus[i].powi(2)) / 2.0;
        let d_same = cfg.delta_same(s);
        let d_cross = cfg.delta_cross(s);
        let density_ratio = cfg.n_ph[i] / cfg.n_z;
        out.kappa_same[i] =
            8.0 * density_ratio * omega_bar_sq / (4.0 * d_same * d_same + 1.0) * gamma;
        out.kappa_cross[i] = 4.0 * (2.0 + (phi[j] - phi[i]).cos()) * density_ratio * omega_bar_sq
            / (4.0 * d_cross * d_cross + 1.0)
            * gamma;
    }
    out.kappa_total = out.kappa_same.iter().chain(out.kappa_cross.iter()).sum();
    out.coherence_time = (out.kappa_total > 0.0).then(|| 1.0 / out.kappa_total);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeThresholds {
    /// Minimum χ_ss/χ_{s s̄} for the hardcore label.
    #[serde(default = "RegimeThresholds::default_ratio")]
    pub ratio_min: f64,
    /// Minimum β_ss^i for the hardcore label.
    #[serde(default = "RegimeThresholds::default_beta")]
    pub beta_min: f64,
}

impl RegimeThresholds {
    fn default_ratio() -> f64 {
        10.0
    }
    fn default_beta() -> f64 {
        10.0
    }
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        RegimeThresholds { ratio_min: 10.0, beta_min: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionRegime {
    Bosonic,
    Crossover,
    HardcoreFermionic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassRegime {
    Massless,
    Massive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regime {
    pub interaction: InteractionRegime,
    pub mass: MassRegime,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = match self.interaction {
            InteractionRegime::Bosonic => "bosonic",
            InteractionRegime::Crossover => "crossover",
            InteractionRegime::HardcoreFermionic => "hardcore_fermionic",
        };
        let m = match self.mass {
            MassRegime::Massless => "massless",
            MassRegime::Massive => "massive",
        };
        write!(f, "{i}/{m}")
    }
}

/// Regime label from coupling magnitudes. Hardcore requires both
/// χ_ss/χ_{s s̄} ≥ `ratio_min` and β_ss^i ≥ `beta_min` for both species;
/// bosonic requires both quantities ≤ 1 for both species.
pub fn classify_regime(p: &PolaritonParams, thresholds: &RegimeThresholds) -> Result<Regime> {
    let beta = interaction_to_kinetic(p, Channel::Same)?;
    let mut hardcore = true;
    let mut bosonic = true;
    for s in Species::BOTH {
        let i = s.index();
        let same_over_cross = (p.chi_same[i] / p.chi_cross[i]).abs();
        let b = beta[i].abs();
        hardcore &= same_over_cross >= thresholds.ratio_min && b >= thresholds.beta_min;
        bosonic &= same_over_cross <= 1.0 && b <= 1.0;
    }
    let interaction = if hardcore {
        InteractionRegime::HardcoreFermionic
    } else if bosonic {
        InteractionRegime::Bosonic
    } else {
        InteractionRegime::Crossover
    };
    let mass = if p.omega0 == 0.0 { MassRegime::Massless } else { MassRegime::Massive };
    Ok(Regime { interaction, mass })
}
