use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::FockSystem;
use super::operator::{Ladder, Operator};
use super::QuantumState;

/// ⟨n_{s,i} n_{s′,j}⟩ over all modes, row-major in `s·M + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityTable {
    pub sites: usize,
    /// ⟨n_{s,i}⟩.
    pub mean: Vec<f64>,
    pub values: Vec<f64>,
}

impl DensityTable {
    pub fn get(&self, s: usize, i: usize, t: usize, j: usize) -> f64 {
        let n = 2 * self.sites;
        self.values[(s * self.sites + i) * n + t * self.sites + j]
    }

    /// M×M block for species pair (s, t).
    pub fn block(&self, s: usize, t: usize) -> Vec<Vec<f64>> {
        (0..self.sites).map(|i| (0..self.sites).map(|j| self.get(s, i, t, j)).collect()).collect()
    }
}

/// ⟨S⁺_i S⁻_j⟩, row-major M×M.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinTable {
    pub sites: usize,
    pub values: Vec<Complex64>,
}

impl SpinTable {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.sites + j]
    }
}

pub fn density_correlations(state: &QuantumState, system: &FockSystem) -> DensityTable {
    let modes = 2 * system.sites();
    let mut values = vec![0.0; modes * modes];
    let mut mean = vec![0.0; modes];
    for (cfg, amp) in system.basis.states().iter().zip(&state.amplitudes) {
        let p = amp.norm_sqr();
        if p == 0.0 {
            continue;
        }
        for a in 0..modes {
            let na = f64::from(cfg[a]);
            if na == 0.0 {
                continue;
            }
            mean[a] += p * na;
            for b in 0..modes {
                values[a * modes + b] += p * na * f64::from(cfg[b]);
            }
        }
    }
    DensityTable { sites: system.sites(), mean, values }
}

fn spin_plus(m: usize, i: usize) -> Operator {
    Operator::hop(i, m + i)
}

pub fn spin_correlations(state: &QuantumState, system: &FockSystem) -> SpinTable {
    let m = system.sites();
    let mut values = vec![Complex64::default(); m * m];
    for i in 0..m {
        for j in 0..m {
            let op = spin_plus(m, i).mul(&spin_plus(m, j).adjoint());
            values[i * m + j] = op.expectation(&system.basis, state);
        }
    }
    SpinTable { sites: m, values }
}

/// Annihilator of a rotated mode, c_↑ b_↑ + c_↓ b_↓.
fn rotated(m: usize, i: usize, up: Complex64, down: Complex64) -> Operator {
    Operator::monomial(up, vec![Ladder::Annihilate(i)]).add(&Operator::monomial(down, vec![Ladder::Annihilate(m + i)]))
}

/// [ρ_{x,+}, ρ_{x,−}, ρ_{y,+}, ρ_{y,−}] at site `i`, built as b†b of
/// b_{x,±} = (b_↑ ± b_↓)/√2 and b_{y,±} = (b_↑ ∓ i b_↓)/√2.
fn rotated_densities(m: usize, i: usize) -> [Operator; 4] {
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let ri = Complex64::new(0.0, FRAC_1_SQRT_2);
    let modes = [rotated(m, i, r, r), rotated(m, i, r, -r), rotated(m, i, r, -ri), rotated(m, i, r, ri)];
    modes.map(|b| b.adjoint().mul(&b))
}

/// Weights of ρ_{x,+}, ρ_{x,−}, ρ_{y,+}, ρ_{y,−} in 2S⁺.
const PLUS_WEIGHTS: [Complex64; 4] = [
    Complex64 { re: 1.0, im: 0.0 },
    Complex64 { re: -1.0, im: 0.0 },
    Complex64 { re: 0.0, im: 1.0 },
    Complex64 { re: 0.0, im: -1.0 },
];

/// max_{i,j} |Σ_{a,b} w_a w̄_b ⟨ρ_{a,i}ρ_{b,j}⟩/4 − ⟨S⁺_i S⁻_j⟩| over the 16
/// rotated density-density terms.
pub fn detection_identity_residual(state: &QuantumState, system: &FockSystem) -> f64 {
    let m = system.sites();
    let direct = spin_correlations(state, system);
    let rho: Vec<[Operator; 4]> = (0..m).map(|i| rotated_densities(m, i)).collect();
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let mut acc = Complex64::default();
            for a in 0..4 {
                for b in 0..4 {
                    let w = PLUS_WEIGHTS[a] * PLUS_WEIGHTS[b].conj() * 0.25;
                    acc += w * rho[i][a].mul(&rho[j][b]).expectation(&system.basis, state);
                }
            }
            worst = worst.max((acc - direct.get(i, j)).norm());
        }
    }
    worst
}

/// max_i |⟨S⁺_i⟩ − ⟨[(ρ_{x,+}−ρ_{x,−}) + i(ρ_{y,+}−ρ_{y,−})]/2⟩|.
pub fn spin_plus_identity_residual(state: &QuantumState, system: &FockSystem) -> f64 {
    let m = system.sites();
    (0..m)
        .map(|i| {
            let direct = spin_plus(m, i).expectation(&system.basis, state);
            let rho = rotated_densities(m, i);
            let via: Complex64 = (0..4)
                .map(|a| PLUS_WEIGHTS[a] * 0.5 * rho[a].expectation(&system.basis, state))
                .sum();
            (direct - via).norm()
        })
        .fold(0.0, f64::max)
}
