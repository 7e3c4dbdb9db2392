use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::observables::measure;
use super::{DynamicsParams, EvolutionSpec, FieldState, Grid1D};
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Runge–Kutta substeps per nonlinear half-step when loss is on.
const LOSS_SUBSTEPS: usize = 4;

/// Conservative step bound:
/// `0.5·min(2m dz²/(πħ), dz/|η|, 1/(|χ|ρ_max/ħ), (2π/Ω_0)/20)`.
/// Terms whose coefficient vanishes are dropped; returns `f64::INFINITY`
/// when nothing constrains the step.
pub fn stability_bound(grid: &Grid1D, params: &DynamicsParams, spec: &EvolutionSpec, rho_max: f64) -> f64 {
    let dz = grid.dz;
    let mut bound = f64::INFINITY;
    if spec.include_quadratic {
        let q = params.hbar_over_2m[0].abs().max(params.hbar_over_2m[1].abs());
        if q > 0.0 {
            bound = bound.min(dz * dz / (PI * q));
        }
    }
    let eta = params.eta[0].abs().max(params.eta[1].abs());
    if eta > 0.0 {
        bound = bound.min(dz / eta);
    }
    let mut g: f64 = 0.0;
    for i in 0..2 {
        let mut same = params.g_same[i].abs();
        let mut cross = params.g_cross[i].abs();
        if spec.include_loss {
            same = same.hypot(params.loss_same[i]);
            cross = cross.hypot(params.loss_cross[i]);
        }
        g = g.max(same + cross);
    }
    if g > 0.0 && rho_max > 0.0 {
        bound = bound.min(1.0 / (g * rho_max));
    }
    if params.omega0 > 0.0 {
        bound = bound.min(2.0 * PI / params.omega0 / 20.0);
    }
    0.5 * bound
}

/// Reusable Strang split-step integrator for fixed grid, coefficients and
/// time step.
pub struct Stepper {
    params: DynamicsParams,
    include_loss: bool,
    half_dt: f64,
    dt: f64,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Row-major 2×2 propagator exp(−iH(k)dt) per wavenumber.
    propagator: Vec<[Complex64; 4]>,
    scratch: Vec<Complex64>,
}

impl Stepper {
    pub fn new(grid: &Grid1D, params: &DynamicsParams, spec: &EvolutionSpec) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.points);
        let inverse = planner.plan_fft_inverse(grid.points);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        let propagator = grid
            .k
            .iter()
            .map(|&k| linear_propagator(k, params, spec.include_quadratic, spec.dt))
            .collect();
        Stepper {
            params: params.clone(),
            include_loss: spec.include_loss,
            half_dt: 0.5 * spec.dt,
            dt: spec.dt,
            n: grid.points,
            forward,
            inverse,
            propagator,
            scratch: vec![Complex64::default(); scratch_len],
        }
    }

    /// Advance `state` by one step in place.
    pub fn advance(&mut self, state: &mut FieldState) {
        self.nonlinear(state);
        self.linear(state);
        self.nonlinear(state);
        state.t += self.dt;
    }

    fn linear(&mut self, state: &mut FieldState) {
        let [up, down] = &mut state.psi;
        self.forward.process_with_scratch(up, &mut self.scratch);
        self.forward.process_with_scratch(down, &mut self.scratch);
        let inv_n = 1.0 / self.n as f64;
        for ((a, b), u) in up.iter_mut().zip(down.iter_mut()).zip(&self.propagator) {
            let (x, y) = (*a, *b);
            *a = (u[0] * x + u[1] * y) * inv_n;
            *b = (u[2] * x + u[3] * y) * inv_n;
        }
        self.inverse.process_with_scratch(up, &mut self.scratch);
        self.inverse.process_with_scratch(down, &mut self.scratch);
    }

    fn nonlinear(&self, state: &mut FieldState) {
        let p = &self.params;
        let h = self.half_dt;
        let [up, down] = &mut state.psi;
        if !self.include_loss {
            for (a, b) in up.iter_mut().zip(down.iter_mut()) {
                let (ra, rb) = (a.norm_sqr(), b.norm_sqr());
                *a *= Complex64::from_polar(1.0, -(p.g_same[0] * ra + p.g_cross[0] * rb) * h);
                *b *= Complex64::from_polar(1.0, -(p.g_same[1] * rb + p.g_cross[1] * ra) * h);
            }
            return;
        }
        for (a, b) in up.iter_mut().zip(down.iter_mut()) {
            let rho0 = [a.norm_sqr(), b.norm_sqr()];
            let (rho, phase) = lossy_local(p, rho0, h);
            if rho0[0] > 0.0 {
                *a *= Complex64::from_polar((rho[0] / rho0[0]).sqrt(), phase[0]);
            }
            if rho0[1] > 0.0 {
                *b *= Complex64::from_polar((rho[1] / rho0[1]).sqrt(), phase[1]);
            }
        }
    }
}

/// exp(−iH(k)dt) for H = [[a_↑, Ω_0], [Ω_0, a_↓]], a_s = ħk²/2m_s − η_s k.
fn linear_propagator(k: f64, p: &DynamicsParams, quadratic: bool, dt: f64) -> [Complex64; 4] {
    let a = |i: usize| {
        let q = if quadratic { p.hbar_over_2m[i] * k * k } else { 0.0 };
        q - p.eta[i] * k
    };
    let (a0, a1) = (a(0), a(1));
    let mean = 0.5 * (a0 + a1);
    let bz = 0.5 * (a0 - a1);
    let bx = p.omega0;
    let b = bz.hypot(bx);
    let phase = Complex64::from_polar(1.0, -mean * dt);
    let c = (b * dt).cos();
    // sin(b dt)/b without dividing by zero
    let s = if b * dt == 0.0 { dt } else { (b * dt).sin() / b };
    [
        phase * Complex64::new(c, -s * bz),
        phase * (-I * s * bx),
        phase * (-I * s * bx),
        phase * Complex64::new(c, s * bz),
    ]
}

/// Local density/phase evolution under complex couplings over time `h`:
/// ρ̇_s = −2ρ_s(l_ss ρ_s + l_ss̄ ρ_s̄), θ̇_s = −(g_ss ρ_s + g_ss̄ ρ_s̄).
fn lossy_local(p: &DynamicsParams, rho0: [f64; 2], h: f64) -> ([f64; 2], [f64; 2]) {
    let rhs = |r: [f64; 2]| -> [f64; 4] {
        [
            -2.0 * r[0] * (p.loss_same[0] * r[0] + p.loss_cross[0] * r[1]),
            -2.0 * r[1] * (p.loss_same[1] * r[1] + p.loss_cross[1] * r[0]),
            -(p.g_same[0] * r[0] + p.g_cross[0] * r[1]),
            -(p.g_same[1] * r[1] + p.g_cross[1] * r[0]),
        ]
    };
    let dt = h / LOSS_SUBSTEPS as f64;
    let mut y = [rho0[0], rho0[1], 0.0, 0.0];
    for _ in 0..LOSS_SUBSTEPS {
        let at = |y: &[f64; 4], k: &[f64; 4], f: f64| {
            [y[0] + f * k[0], y[1] + f * k[1]]
        };
        let k1 = rhs([y[0], y[1]]);
        let k2 = rhs(at(&y, &k1, 0.5 * dt));
        let k3 = rhs(at(&y, &k2, 0.5 * dt));
        let k4 = rhs(at(&y, &k3, dt));
        for m in 0..4 {
            y[m] += dt / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
        }
    }
    ([y[0].max(0.0), y[1].max(0.0)], [y[2], y[3]])
}

/// One Strang step: half nonlinear rotation, exact linear step in k-space,
/// half nonlinear rotation.
pub fn step(state: &FieldState, params: &DynamicsParams, spec: &EvolutionSpec) -> Result<FieldState> {
    let mut next = state.clone();
    Stepper::new(&state.grid, params, spec).advance(&mut next);
    if !next.is_finite() {
        return Err(Error::NonFinite { step: 1 });
    }
    Ok(next)
}

/// Scalar observables recorded along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub step: usize,
    pub t: f64,
    pub norm: [f64; 2],
    pub total_norm: f64,
    pub centroid: [f64; 2],
    pub width: [f64; 2],
    /// Mean-field energy, J.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Field copies at each sample when `keep_snapshots` is set.
    pub snapshots: Vec<FieldState>,
    pub final_state: FieldState,
}

fn sample(step: usize, state: &FieldState, params: &DynamicsParams, quadratic: bool) -> Sample {
    let obs = measure(state, params, quadratic);
    Sample {
        step,
        t: state.t,
        norm: obs.norm,
        total_norm: obs.norm[0] + obs.norm[1],
        centroid: obs.centroid,
        width: obs.width,
        energy: obs.energy,
    }
}

/// Run `spec.steps` steps, sampling every `spec.stride` steps.
pub fn evolve(state: &FieldState, params: &DynamicsParams, spec: &EvolutionSpec) -> Result<Trajectory> {
    if !(spec.dt.is_finite() && spec.dt > 0.0) {
        return Err(Error::Config(format!("dt must be > 0, got {}", spec.dt)));
    }
    if spec.stride == 0 {
        return Err(Error::Config("stride must be >= 1".into()));
    }
    if spec.enforce_stability {
        let rho_max = state.psi.iter().flatten().map(|c| c.norm_sqr()).fold(0.0, f64::max);
        let bound = stability_bound(&state.grid, params, spec, rho_max);
        if spec.dt > bound {
            return Err(Error::Config(format!(
                "dt = {:e} s exceeds the stability bound {:e} s",
                spec.dt, bound
            )));
        }
    }
    let mut stepper = Stepper::new(&state.grid, params, spec);
    let mut current = state.clone();
    let mut samples = vec![sample(0, &current, params, spec.include_quadratic)];
    let mut snapshots = Vec::new();
    if spec.keep_snapshots {
        snapshots.push(current.clone());
    }
    for n in 1..=spec.steps {
        stepper.advance(&mut current);
        if !current.is_finite() {
            return Err(Error::NonFinite { step: n });
        }
        if n % spec.stride == 0 || n == spec.steps {
            samples.push(sample(n, &current, params, spec.include_quadratic));
            if spec.keep_snapshots {
                snapshots.push(current.clone());
            }
        }
    }
    Ok(Trajectory { samples, snapshots, final_state: current })
}
