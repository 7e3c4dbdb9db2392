//! Exact diagonalization of a lattice transcription of the two-species
//! bosonic Thirring Hamiltonian
//!
//! ```text
//! H = Σ_s Σ_j [(−J_s + iλ_s) b†_{s,j+1}b_{s,j} + h.c.]
//!   + Σ_{s,j} (U_s/2) n_{s,j}(n_{s,j} − 1) + U_x Σ_j n_{↑,j}n_{↓,j}
//!   + W Σ_j (b†_{↑,j}b_{↓,j} + h.c.)
//! ```
//!
//! Fields are sampled as Ψ_s(z_j) → b_{s,j}/√a. The second derivative is the
//! three-point stencil and the Dirac term a symmetric difference, so the
//! single-particle band −2J cos k + 2λ sin k carries the usual fermion
//! doubler at k ≈ π. That is fine here: the lattice is used to check operator
//! identities and the hardcore-to-free-fermion mapping, not continuum
//! spectroscopy.
//!
//! Modes are indexed `s·M + j` throughout.

mod basis;
mod eigen;
mod free_fermion;
mod hamiltonian;
mod observables;
mod operator;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use basis::{basis_dimension, FockBasis, Sector, DEFAULT_BASIS_CAP};
pub use eigen::{ground_state, ground_state_with, EigenMethod, GroundState};
pub use free_fermion::{
    fermionization_check, free_fermion_oracle, single_particle_modes, FermionizationReport, FreeFermionTable,
};
pub use hamiltonian::{FockSystem, LatticeParams, SparseHermitian};
pub use observables::{
    density_correlations, detection_identity_residual, spin_correlations, spin_plus_identity_residual,
    DensityTable, SpinTable,
};
pub use operator::{Ladder, Operator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
    /// Periodic with a −1 on the wrapping bond.
    Antiperiodic,
}

/// Normalized amplitudes over a [`FockBasis`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumState {
    pub amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// Normalizes `amplitudes`; the zero vector is rejected.
    pub fn new(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = l2(&amplitudes);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Domain("state vector has zero or non-finite norm".into()));
        }
        amplitudes.iter_mut().for_each(|c| *c /= n);
        Ok(QuantumState { amplitudes })
    }

    /// Uniformly random complex amplitudes, normalized. Deterministic per seed.
    pub fn random(dim: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        QuantumState::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        l2(&self.amplitudes)
    }
}

pub(crate) fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}
