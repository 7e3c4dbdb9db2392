use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{DynamicsParams, FieldState};
use crate::units::HBAR;

/// Quadrature observables of a field state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub norm: [f64; 2],
    /// First moment of |Ψ_s|² on `[0, L)`, m. Zero for an empty species.
    pub centroid: [f64; 2],
    /// Standard deviation of |Ψ_s|², m.
    pub width: [f64; 2],
    /// Mean wavenumber ⟨k⟩ of each species, 1/m.
    pub momentum: [f64; 2],
    pub density: [Vec<f64>; 2],
    /// S⁺(z) = Ψ_↑*(z)Ψ_↓(z).
    pub spin_density: Vec<Complex64>,
    /// Mean-field energy, J.
    pub energy: f64,
}

/// Norms, moments, densities, S⁺(z) and the mean-field energy
///
/// ```text
/// E = Σ_s ∫ Ψ_s*(−ħ²/2m_s ∂² + iħη_s∂)Ψ_s + ħΩ_0(Ψ_↑*Ψ_↓ + c.c.)
///     + Σ_s (χ_ss/2)|Ψ_s|⁴ + χ_x|Ψ_↑|²|Ψ_↓|²,
/// ```
///
/// with χ_x the mean of χ_{↑↓} and χ_{↓↑}. The quadratic term is included
/// only when `quadratic` is set.
pub fn measure(state: &FieldState, params: &DynamicsParams, quadratic: bool) -> Observables {
    let grid = &state.grid;
    let dz = grid.dz;
    let z = grid.positions();
    let density: [Vec<f64>; 2] = [
        state.psi[0].iter().map(|c| c.norm_sqr()).collect(),
        state.psi[1].iter().map(|c| c.norm_sqr()).collect(),
    ];

    let mut norm = [0.0; 2];
    let mut centroid = [0.0; 2];
    let mut width = [0.0; 2];
    for s in 0..2 {
        let n: f64 = density[s].iter().sum::<f64>() * dz;
        norm[s] = n;
        if n > 0.0 {
            let c = density[s].iter().zip(&z).map(|(r, z)| r * z).sum::<f64>() * dz / n;
            let var = density[s].iter().zip(&z).map(|(r, z)| r * (z - c).powi(2)).sum::<f64>() * dz / n;
            centroid[s] = c;
            width[s] = var.sqrt();
        }
    }

    let spin_density: Vec<Complex64> =
        state.psi[0].iter().zip(&state.psi[1]).map(|(a, b)| a.conj() * b).collect();

    // Kinetic part in k-space: ∫Ψ*ωΨ dz = L Σ_k |c_k|² ω(k), c_k = FFT/N.
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(grid.points);
    let n_pts = grid.points as f64;
    let mut momentum = [0.0; 2];
    let mut kinetic = 0.0;
    for s in 0..2 {
        let mut buf = state.psi[s].clone();
        fft.process(&mut buf);
        let mut weight = 0.0;
        let mut k_sum = 0.0;
        for (c, &k) in buf.iter().zip(&grid.k) {
            let w = c.norm_sqr() / (n_pts * n_pts);
            let q = if quadratic { params.hbar_over_2m[s] * k * k } else { 0.0 };
            kinetic += grid.length * w * (q - params.eta[s] * k);
            weight += w;
            k_sum += w * k;
        }
        if weight > 0.0 {
            momentum[s] = k_sum / weight;
        }
    }

    let coupling: f64 = spin_density.iter().map(|c| c.re).sum::<f64>() * dz * 2.0 * params.omega0;
    let g_x = 0.5 * (params.g_cross[0] + params.g_cross[1]);
    let mut interaction = 0.0;
    for j in 0..grid.points {
        let (ra, rb) = (density[0][j], density[1][j]);
        interaction += 0.5 * params.g_same[0] * ra * ra + 0.5 * params.g_same[1] * rb * rb + g_x * ra * rb;
    }
    interaction *= dz;

    Observables {
        norm,
        centroid,
        width,
        momentum,
        density,
        spin_density,
        energy: HBAR * (kinetic + coupling + interaction),
    }
}

/// Densities of the polarization-rotated modes
/// Ψ_{x,±} = (Ψ_↑ ± Ψ_↓)/√2 and Ψ_{y,±} = (Ψ_↑ ∓ iΨ_↓)/√2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotatedDensities {
    pub x_plus: Vec<f64>,
    pub x_minus: Vec<f64>,
    pub y_plus: Vec<f64>,
    pub y_minus: Vec<f64>,
}

impl RotatedDensities {
    /// [(ρ_{x,+} − ρ_{x,−}) + i(ρ_{y,+} − ρ_{y,−})]/2 at each grid point.
    pub fn reconstructed_spin(&self) -> Vec<Complex64> {
        (0..self.x_plus.len())
            .map(|j| {
                Complex64::new(self.x_plus[j] - self.x_minus[j], self.y_plus[j] - self.y_minus[j]) * 0.5
            })
            .collect()
    }

    /// Largest pointwise |reconstructed − S⁺| against a given spin density.
    pub fn identity_residual(&self, spin_density: &[Complex64]) -> f64 {
        self.reconstructed_spin()
            .iter()
            .zip(spin_density)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub fn rotated_densities(state: &FieldState) -> RotatedDensities {
    let i = Complex64::i();
    let half = |c: Complex64| 0.5 * c.norm_sqr();
    let (mut xp, mut xm, mut yp, mut ym) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (a, b) in state.psi[0].iter().zip(&state.psi[1]) {
        xp.push(half(a + b));
        xm.push(half(a - b));
        yp.push(half(a - i * b));
        ym.push(half(a + i * b));
    }
    RotatedDensities { x_plus: xp, x_minus: xm, y_plus: yp, y_minus: ym }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{init_gaussian, Grid1D};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn zero_params() -> DynamicsParams {
        DynamicsParams {
            hbar_over_2m: [0.0; 2],
            eta: [0.0; 2],
            omega0: 0.0,
            g_same: [0.0; 2],
            g_cross: [0.0; 2],
            loss_same: [0.0; 2],
            loss_cross: [0.0; 2],
        }
    }

    fn random_state(seed: u64) -> FieldState {
        let g = Grid1D::new(1.0, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut field = || (0..64).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let up = field();
        let down = field();
        FieldState::new(g, up, down).unwrap()
    }

    #[test]
    fn equal_fields_have_real_spin_density() {
        let g = Grid1D::new(1.0, 64).unwrap();
        let s = init_gaussian(&g, 0.5, 0.05, 30.0, [1.0, 1.0]).unwrap();
        let obs = measure(&s, &zero_params(), true);
        for (sp, rho) in obs.spin_density.iter().zip(&obs.density[0]) {
            assert!(sp.im.abs() < 1e-15);
            assert_relative_eq!(sp.re, *rho, max_relative = 1e-14);
        }
    }

    #[test]
    fn single_species_has_no_spin_density() {
        let g = Grid1D::new(1.0, 64).unwrap();
        let s = init_gaussian(&g, 0.5, 0.05, 0.0, [1.0, 0.0]).unwrap();
        let obs = measure(&s, &zero_params(), true);
        assert!(obs.spin_density.iter().all(|c| c.norm() == 0.0));
        assert_eq!(obs.norm[1], 0.0);
    }

    #[test]
    fn gaussian_moments() {
        let g = Grid1D::new(1.0, 512).unwrap();
        let s = init_gaussian(&g, 0.3, 0.04, 0.0, [2.0, 2.0]).unwrap();
        let obs = measure(&s, &zero_params(), true);
        assert_relative_eq!(obs.centroid[0], 0.3, max_relative = 1e-10);
        assert_relative_eq!(obs.width[0], 0.04, max_relative = 1e-10);
        assert!(obs.momentum[0].abs() < 1e-10);
        let moving = init_gaussian(&g, 0.3, 0.04, 2.0 * std::f64::consts::PI * 20.0, [1.0, 0.0]).unwrap();
        let obs = measure(&moving, &zero_params(), true);
        assert_relative_eq!(obs.momentum[0], 2.0 * std::f64::consts::PI * 20.0, max_relative = 1e-10);
    }

    #[test]
    fn detection_identity_is_pointwise_exact() {
        for seed in 0..5 {
            let s = random_state(seed);
            let obs = measure(&s, &zero_params(), false);
            assert!(rotated_densities(&s).identity_residual(&obs.spin_density) < 1e-14);
        }
    }

    #[test]
    fn lone_up_field_splits_evenly() {
        let g = Grid1D::new(1.0, 32).unwrap();
        let s = init_gaussian(&g, 0.5, 0.1, 0.0, [1.0, 0.0]).unwrap();
        let r = rotated_densities(&s);
        for j in 0..32 {
            let half = 0.5 * s.psi[0][j].norm_sqr();
            for v in [r.x_plus[j], r.x_minus[j], r.y_plus[j], r.y_minus[j]] {
                assert_relative_eq!(v, half, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn quarter_phase_down_field() {
        let mut s = random_state(9);
        s.psi[1] = s.psi[0].iter().map(|a| Complex64::i() * a).collect();
        let r = rotated_densities(&s);
        for j in 0..64 {
            let rho = s.psi[0][j].norm_sqr();
            assert_relative_eq!(r.y_plus[j] - r.y_minus[j], 2.0 * rho, max_relative = 1e-13, epsilon = 1e-15);
            assert!((r.x_plus[j] - r.x_minus[j]).abs() < 1e-15);
        }
    }
}
