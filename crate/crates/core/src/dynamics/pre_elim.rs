//! Coupled symmetric/antisymmetric polariton fields before adiabatic
//! elimination, at mean-field level:
//!
//! ```text
//! (1 + T/2)∂tΨ_s + v∂z[(α₊−α₋)Ψ_s + 2α₊α₋A_s]
//!     = i(T/2)Ω_0Ψ_s̄ − i(2g²/Δ_ss)|Ψ_s|²Ψ_s − i(g²/Δ_ss̄)(2+cos(φ_s̄−φ_s))|Ψ_s̄|²Ψ_s
//! ∂tA_s + v∂z[2Ψ_s + (α₋−α₊)A_s]
//!     = −i(n_z g²/Δ_s)A_s − i(g²/Δ_ss)|Ψ_s|²A_s − i(g²/Δ_ss̄)|Ψ_s̄|²A_s
//!       − i(g²Ω_s̄₊/(Δ_ss̄Ω_s₊))Ψ_s̄*Ψ_s A_s̄
//! ```
//!
//! with T = tan²θ_s. The cross term in the last line is implemented as
//! printed; its behaviour under s ↔ s̄ is not symmetric in general.
//!
//! Transport uses first-order flux-vector-split upwinding; time stepping is
//! explicit midpoint with the stiff local rotation −i(n_z g²/Δ_s)A_s
//! integrated exactly. With `linewidth_damping` set, Δ_s is replaced by
//! Δ_s + iΓ/2 in that term only, which relaxes A_s toward the pulse-matched
//! state instead of letting it precess forever.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Grid1D;
use crate::error::{Error, Result};
use crate::params::{OpticalConfig, PolaritonParams, Species};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreElimState {
    pub psi: [Vec<Complex64>; 2],
    pub a: [Vec<Complex64>; 2],
    pub t: f64,
    pub grid: Grid1D,
}

impl PreElimState {
    pub fn new(grid: Grid1D, psi: [Vec<Complex64>; 2], a: [Vec<Complex64>; 2]) -> Result<Self> {
        if psi.iter().chain(a.iter()).any(|f| f.len() != grid.points) {
            return Err(Error::Config("pre-elimination fields must match the grid".into()));
        }
        Ok(PreElimState { psi, a, t: 0.0, grid })
    }

    /// ‖A_s‖/‖Ψ_s‖ (discrete L² norms); zero when Ψ_s vanishes.
    pub fn mismatch(&self, s: Species) -> f64 {
        let i = s.index();
        let na: f64 = self.a[i].iter().map(|c| c.norm_sqr()).sum();
        let np: f64 = self.psi[i].iter().map(|c| c.norm_sqr()).sum();
        if np == 0.0 {
            0.0
        } else {
            (na / np).sqrt()
        }
    }
}

fn default_true() -> bool {
    true
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreElimSpec {
    pub dt: f64,
    pub steps: usize,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default = "default_true")]
    pub linewidth_damping: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreElimTrajectory {
    pub times: Vec<f64>,
    /// ‖A_s‖/‖Ψ_s‖ per species at each sample.
    pub mismatch: [Vec<f64>; 2],
    pub final_state: PreElimState,
}

/// Per-species coefficients in SI (rates in rad/s).
#[derive(Debug, Clone)]
struct Coefficients {
    /// Upwind flux matrices (row-major) acting on (Ψ_s, A_s).
    flux_plus: [[f64; 4]; 2],
    flux_minus: [[f64; 4]; 2],
    max_speed: f64,
    /// Multiplies Ψ_s̄ in ∂tΨ_s.
    psi_coupling: [Complex64; 2],
    /// Multiply |Ψ_s|²Ψ_s and |Ψ_s̄|²Ψ_s in ∂tΨ_s.
    psi_same: [Complex64; 2],
    psi_cross: [Complex64; 2],
    /// Exact local rate on A_s.
    a_local: [Complex64; 2],
    a_same: [Complex64; 2],
    a_cross: [Complex64; 2],
    /// Multiplies Ψ_s̄*Ψ_s A_s̄ in ∂tA_s.
    a_exchange: [Complex64; 2],
}

fn split_flux(f: [f64; 4]) -> ([f64; 4], [f64; 4], f64) {
    // Real 2×2 with tr² − 4det > 0 by construction (eigenvalues of opposite sign).
    let tr = f[0] + f[3];
    let det = f[0] * f[3] - f[1] * f[2];
    let disc = (tr * tr / 4.0 - det).sqrt();
    let (l1, l2) = (tr / 2.0 + disc, tr / 2.0 - disc);
    let proj = |lam_other: f64, lam: f64| {
        let d = lam - lam_other;
        [(f[0] - lam_other) / d, f[1] / d, f[2] / d, (f[3] - lam_other) / d]
    };
    let p1 = proj(l2, l1);
    let p2 = proj(l1, l2);
    let mut plus = [0.0; 4];
    let mut minus = [0.0; 4];
    for (lam, p) in [(l1, p1), (l2, p2)] {
        let target = if lam > 0.0 { &mut plus } else { &mut minus };
        for m in 0..4 {
            target[m] += lam * p[m];
        }
    }
    (plus, minus, l1.abs().max(l2.abs()))
}

impl Coefficients {
    fn new(cfg: &OpticalConfig, p: &PolaritonParams, damping: bool) -> Self {
        let gamma = cfg.gamma_abs;
        let v = cfg.v_empty;
        let mut c = Coefficients {
            flux_plus: [[0.0; 4]; 2],
            flux_minus: [[0.0; 4]; 2],
            max_speed: 0.0,
            psi_coupling: [Complex64::default(); 2],
            psi_same: [Complex64::default(); 2],
            psi_cross: [Complex64::default(); 2],
            a_local: [Complex64::default(); 2],
            a_same: [Complex64::default(); 2],
            a_cross: [Complex64::default(); 2],
            a_exchange: [Complex64::default(); 2],
        };
        for s in Species::BOTH {
            let i = s.index();
            let j = s.other().index();
            let t = p.tan2_theta[i];
            let lhs = 1.0 + t / 2.0;
            let asym = p.alpha_plus[i] - p.alpha_minus[i];
            let prod = 2.0 * p.alpha_plus[i] * p.alpha_minus[i];
            let flux = [v * asym / lhs, v * prod / lhs, 2.0 * v, -v * asym];
            let (fp, fm, speed) = split_flux(flux);
            c.flux_plus[i] = fp;
            c.flux_minus[i] = fm;
            c.max_speed = c.max_speed.max(speed);

            let g2 = t * p.omega_bar[i].powi(2) / cfg.n_z;
            let d_same = cfg.delta_same(s) * gamma;
            let d_cross = cfg.delta_cross(s) * gamma;
            let angle = 2.0 + (p.phi[j] - p.phi[i]).cos();
            c.psi_coupling[i] = I * (t / 2.0) * p.omega0 / lhs;
            c.psi_same[i] = -I * (2.0 * g2 / d_same) / lhs;
            c.psi_cross[i] = -I * (g2 / d_cross) * angle / lhs;

            let delta = Complex64::new(p.delta[i], if damping { gamma / 2.0 } else { 0.0 });
            c.a_local[i] = -I * (cfg.n_z * g2) / delta;
            c.a_same[i] = -I * g2 / d_same;
            c.a_cross[i] = -I * g2 / d_cross;
            c.a_exchange[i] = -I * g2 * cfg.omega_plus[j] / (d_cross * cfg.omega_plus[i]);
        }
        c
    }

    /// Everything except the exact local rotation of A.
    fn rhs(&self, dz: f64, psi: &[Vec<Complex64>; 2], a: &[Vec<Complex64>; 2]) -> ([Vec<Complex64>; 2], [Vec<Complex64>; 2]) {
        let n = psi[0].len();
        let mut dpsi = [vec![Complex64::default(); n], vec![Complex64::default(); n]];
        let mut da = [vec![Complex64::default(); n], vec![Complex64::default(); n]];
        for s in 0..2 {
            let o = 1 - s;
            let (fp, fm) = (&self.flux_plus[s], &self.flux_minus[s]);
            for jz in 0..n {
                let prev = (jz + n - 1) % n;
                let next = (jz + 1) % n;
                let (bp, ba) = (psi[s][jz] - psi[s][prev], a[s][jz] - a[s][prev]);
                let (fpsi, fa) = (psi[s][next] - psi[s][jz], a[s][next] - a[s][jz]);
                let div_psi = (fp[0] * bp + fp[1] * ba + fm[0] * fpsi + fm[1] * fa) / dz;
                let div_a = (fp[2] * bp + fp[3] * ba + fm[2] * fpsi + fm[3] * fa) / dz;

                let rs = psi[s][jz].norm_sqr();
                let ro = psi[o][jz].norm_sqr();
                dpsi[s][jz] = -div_psi
                    + self.psi_coupling[s] * psi[o][jz]
                    + (self.psi_same[s] * rs + self.psi_cross[s] * ro) * psi[s][jz];
                da[s][jz] = -div_a
                    + (self.a_same[s] * rs + self.a_cross[s] * ro) * a[s][jz]
                    + self.a_exchange[s] * psi[o][jz].conj() * psi[s][jz] * a[o][jz];
            }
        }
        (dpsi, da)
    }
}

/// Integrate the pre-elimination system and report ‖A_s‖/‖Ψ_s‖ over time.
pub fn evolve_pre_elimination(
    state: &PreElimState,
    cfg: &OpticalConfig,
    params: &PolaritonParams,
    spec: &PreElimSpec,
) -> Result<PreElimTrajectory> {
    if !(spec.dt.is_finite() && spec.dt > 0.0) || spec.stride == 0 {
        return Err(Error::Config("pre-elimination needs dt > 0 and stride >= 1".into()));
    }
    let coeff = Coefficients::new(cfg, params, spec.linewidth_damping);
    let dz = state.grid.dz;
    let courant = coeff.max_speed * spec.dt / dz;
    if courant > 1.0 {
        return Err(Error::Cfl(format!(
            "Courant number {courant:.3} > 1 (speed {:e} m/s, dt {:e} s, dz {:e} m)",
            coeff.max_speed, spec.dt, dz
        )));
    }
    let h = spec.dt;
    let full = [(coeff.a_local[0] * h).exp(), (coeff.a_local[1] * h).exp()];
    let half = [(coeff.a_local[0] * h / 2.0).exp(), (coeff.a_local[1] * h / 2.0).exp()];

    let mut cur = state.clone();
    let mut times = vec![cur.t];
    let mut mismatch = [vec![cur.mismatch(Species::Up)], vec![cur.mismatch(Species::Down)]];
    for n in 1..=spec.steps {
        let (k1p, k1a) = coeff.rhs(dz, &cur.psi, &cur.a);
        let mut mid_psi = cur.psi.clone();
        let mut mid_a = cur.a.clone();
        for s in 0..2 {
            for j in 0..mid_psi[s].len() {
                mid_psi[s][j] += 0.5 * h * k1p[s][j];
                mid_a[s][j] = half[s] * (mid_a[s][j] + 0.5 * h * k1a[s][j]);
            }
        }
        let (k2p, k2a) = coeff.rhs(dz, &mid_psi, &mid_a);
        for s in 0..2 {
            for j in 0..cur.psi[s].len() {
                cur.psi[s][j] += h * k2p[s][j];
                cur.a[s][j] = full[s] * cur.a[s][j] + h * half[s] * k2a[s][j];
            }
        }
        cur.t += h;
        let finite = cur.psi.iter().chain(cur.a.iter()).flatten().all(|c| c.re.is_finite() && c.im.is_finite());
        if !finite {
            return Err(Error::NonFinite { step: n });
        }
        if n % spec.stride == 0 || n == spec.steps {
            times.push(cur.t);
            mismatch[0].push(cur.mismatch(Species::Up));
            mismatch[1].push(cur.mismatch(Species::Down));
        }
    }
    Ok(PreElimTrajectory { times, mismatch, final_state: cur })
}
