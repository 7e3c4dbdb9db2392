use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::ground_state;
use super::hamiltonian::{FockSystem, LatticeParams};
use super::observables::density_correlations;
use super::{Boundary, Sector};
use crate::error::{Error, Result};

/// Single-particle orbital with its energy and, for plane waves, its
/// momentum index.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbital {
    pub energy: f64,
    pub momentum_index: Option<usize>,
    pub amplitudes: Vec<Complex64>,
}

/// One-body eigenmodes of Σ_j[(−J + iλ) c†_{j+1}c_j + h.c.], ascending in
/// energy. Equal energies (to 1e-12 relative) are ordered by momentum index
/// on rings and by solver order on open chains.
pub fn single_particle_modes(sites: usize, j: f64, lambda: f64, boundary: Boundary) -> Vec<Orbital> {
    let m = sites;
    let mut orbitals: Vec<Orbital> = match boundary {
        Boundary::Periodic | Boundary::Antiperiodic => {
            let twist = if boundary == Boundary::Antiperiodic { PI } else { 0.0 };
            let norm = (m as f64).sqrt().recip();
            (0..m)
                .map(|q| {
                    let k = (2.0 * PI * q as f64 + twist) / m as f64;
                    Orbital {
                        energy: -2.0 * j * k.cos() + 2.0 * lambda * k.sin(),
                        momentum_index: Some(q),
                        amplitudes: (0..m).map(|x| Complex64::from_polar(norm, k * x as f64)).collect(),
                    }
                })
                .collect()
        }
        Boundary::Open => {
            let t = Complex64::new(-j, lambda);
            let mut h = DMatrix::<Complex64>::zeros(m, m);
            for x in 0..m - 1 {
                h[(x + 1, x)] = t;
                h[(x, x + 1)] = t.conj();
            }
            let eig = h.symmetric_eigen();
            (0..m)
                .map(|n| Orbital {
                    energy: eig.eigenvalues[n],
                    momentum_index: None,
                    amplitudes: eig.eigenvectors.column(n).iter().copied().collect(),
                })
                .collect()
        }
    };
    orbitals.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    // Regroup near-degenerate runs by momentum index.
    let scale = orbitals.iter().map(|o| o.energy.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < orbitals.len() {
        let mut end = start + 1;
        while end < orbitals.len() && orbitals[end].energy - orbitals[start].energy <= 1e-12 * scale {
            end += 1;
        }
        orbitals[start..end].sort_by_key(|o| o.momentum_index);
        start = end;
    }
    orbitals
}

fn degenerate_at_fermi_level(orbitals: &[Orbital], n: usize) -> bool {
    if n == 0 || n >= orbitals.len() {
        return false;
    }
    let scale = orbitals.iter().map(|o| o.energy.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    (orbitals[n].energy - orbitals[n - 1].energy).abs() <= 1e-12 * scale
}

/// Slater-determinant ground state of N free fermions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeFermionTable {
    pub sites: usize,
    pub particles: usize,
    pub energy: f64,
    /// ⟨n_i⟩.
    pub density: Vec<f64>,
    /// G_ij = ⟨c†_i c_j⟩, row-major.
    pub one_body: Vec<Complex64>,
    /// ⟨n_i n_j⟩ = G_ii G_jj − |G_ij|² + δ_ij G_ii, row-major.
    pub nn: Vec<f64>,
    /// The highest filled level was degenerate with the lowest empty one.
    pub degenerate_fermi_level: bool,
}

impl FreeFermionTable {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.nn[i * self.sites + j]
    }
}

pub fn free_fermion_oracle(sites: usize, particles: usize, j: f64, lambda: f64, boundary: Boundary) -> Result<FreeFermionTable> {
    if sites < 2 || particles > sites {
        return Err(Error::Domain(format!(
            "free-fermion oracle needs 2 <= M and N <= M, got M = {sites}, N = {particles}"
        )));
    }
    let orbitals = single_particle_modes(sites, j, lambda, boundary);
    let degenerate = degenerate_at_fermi_level(&orbitals, particles);
    if degenerate {
        log::warn!(
            "degenerate Fermi level for M = {sites}, N = {particles}; filling lowest momentum indices first"
        );
    }
    let filled = &orbitals[..particles];
    let m = sites;
    let mut g = vec![Complex64::default(); m * m];
    for o in filled {
        for x in 0..m {
            for y in 0..m {
                g[x * m + y] += o.amplitudes[x].conj() * o.amplitudes[y];
            }
        }
    }
    let density: Vec<f64> = (0..m).map(|x| g[x * m + x].re).collect();
    let mut nn = vec![0.0; m * m];
    for x in 0..m {
        for y in 0..m {
            let mut v = density[x] * density[y] - g[x * m + y].norm_sqr();
            if x == y {
                v += density[x];
            }
            nn[x * m + y] = v;
        }
    }
    Ok(FreeFermionTable {
        sites,
        particles,
        energy: filled.iter().map(|o| o.energy).sum(),
        density,
        one_body: g,
        nn,
        degenerate_fermi_level: degenerate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FermionizationRow {
    /// U/J; infinite for the hardcore basis.
    pub u_over_j: f64,
    pub energy: f64,
    /// max_{i,j} |⟨n_in_j⟩_ED − ⟨n_in_j⟩_free|.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FermionizationReport {
    pub sites: usize,
    pub particles: usize,
    pub boundary: Boundary,
    /// Boundary used for the fermions; a ring with even N picks up the
    /// Jordan–Wigner twist.
    pub fermion_boundary: Boundary,
    pub oracle_energy: f64,
    pub rows: Vec<FermionizationRow>,
    pub hardcore: FermionizationRow,
}

impl FermionizationReport {
    pub fn monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].deviation < w[0].deviation)
    }
}

/// Boundary seen by Jordan–Wigner fermions for hardcore bosons on `boundary`.
pub fn fermion_boundary(boundary: Boundary, particles: usize) -> Boundary {
    let flip = particles.is_multiple_of(2);
    match boundary {
        Boundary::Open => Boundary::Open,
        Boundary::Periodic if flip => Boundary::Antiperiodic,
        Boundary::Antiperiodic if flip => Boundary::Periodic,
        b => b,
    }
}

/// Single-species Bose–Hubbard ground states for each U/J in `u_over_j`, and
/// the hardcore limit, against the free-fermion density correlations.
pub fn fermionization_check(
    sites: usize,
    particles: usize,
    j: f64,
    u_over_j: &[f64],
    boundary: Boundary,
) -> Result<FermionizationReport> {
    let fb = fermion_boundary(boundary, particles);
    let oracle = free_fermion_oracle(sites, particles, j, 0.0, fb)?;
    let run = |u: Option<f64>| -> Result<FermionizationRow> {
        let mut p = LatticeParams::hopping_only(sites, j, boundary);
        match u {
            Some(u) => p.u_same = [u * j, 0.0],
            None => p.hardcore = [true, false],
        }
        let sys = FockSystem::new(p, Sector::Species([particles, 0]))?;
        let gs = ground_state(&sys)?;
        let t = density_correlations(&gs.state, &sys);
        let mut dev: f64 = 0.0;
        for x in 0..sites {
            for y in 0..sites {
                dev = dev.max((t.get(0, x, 0, y) - oracle.get(x, y)).abs());
            }
        }
        Ok(FermionizationRow { u_over_j: u.unwrap_or(f64::INFINITY), energy: gs.energy, deviation: dev })
    };
    let mut rows = Vec::with_capacity(u_over_j.len());
    for &u in u_over_j {
        if !(u.is_finite() && u >= 0.0) {
            return Err(Error::Config(format!("U/J values must be finite and >= 0, got {u}")));
        }
        rows.push(run(Some(u))?);
    }
    Ok(FermionizationReport {
        sites,
        particles,
        boundary,
        fermion_boundary: fb,
        oracle_energy: oracle.energy,
        rows,
        hardcore: run(None)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filled_band() {
        let t = free_fermion_oracle(5, 5, 1.0, 0.3, Boundary::Periodic).unwrap();
        for x in 0..5 {
            assert!((t.density[x] - 1.0).abs() < 1e-12);
            for y in 0..5 {
                assert!((t.get(x, y) - 1.0).abs() < 1e-12);
                let expect = if x == y { 1.0 } else { 0.0 };
                assert!((t.one_body[x * 5 + y] - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn single_mode_arithmetic() {
        let m = 6;
        let t = free_fermion_oracle(m, 1, 1.0, 0.0, Boundary::Periodic).unwrap();
        for x in 0..m {
            for y in 0..m {
                let expect = if x == y { 1.0 / m as f64 } else { 0.0 };
                assert!((t.get(x, y) - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn degenerate_fermi_level_is_flagged_and_deterministic() {
        // M = 6, N = 2, periodic: levels k = ±2π/6 share an energy.
        let a = free_fermion_oracle(6, 2, 1.0, 0.0, Boundary::Periodic).unwrap();
        let b = free_fermion_oracle(6, 2, 1.0, 0.0, Boundary::Periodic).unwrap();
        assert!(a.degenerate_fermi_level);
        assert_eq!(a, b);
        let modes = single_particle_modes(6, 1.0, 0.0, Boundary::Periodic);
        assert_eq!(modes[1].momentum_index, Some(1));
        assert_eq!(modes[2].momentum_index, Some(5));
    }

    /// Brute-force fermionic ED: antisymmetric basis of N-subsets, hopping
    /// with Jordan–Wigner signs from the occupied sites in between.
    fn fermion_ed_nn(m: usize, n: usize, j: f64, lambda: f64) -> (f64, Vec<f64>) {
        let subsets: Vec<u32> = (0u32..1 << m).filter(|s| s.count_ones() as usize == n).collect();
        let pos = |s: u32| subsets.iter().position(|&x| x == s).unwrap();
        let d = subsets.len();
        let mut h = DMatrix::<Complex64>::zeros(d, d);
        let t = Complex64::new(-j, lambda);
        for (col, &s) in subsets.iter().enumerate() {
            for x in 0..m - 1 {
                // c†_{x+1} c_x and its conjugate; neighbours, so no string sign.
                if s & (1 << x) != 0 && s & (1 << (x + 1)) == 0 {
                    let row = pos(s ^ (1 << x) ^ (1 << (x + 1)));
                    h[(row, col)] += t;
                }
                if s & (1 << (x + 1)) != 0 && s & (1 << x) == 0 {
                    let row = pos(s ^ (1 << x) ^ (1 << (x + 1)));
                    h[(row, col)] += t.conj();
                }
            }
        }
        let eig = h.symmetric_eigen();
        let (k, e0) = eig.eigenvalues.iter().enumerate().fold((0, f64::INFINITY), |b, (i, &e)| if e < b.1 { (i, e) } else { b });
        let v = eig.eigenvectors.column(k);
        let mut nn = vec![0.0; m * m];
        for (idx, &s) in subsets.iter().enumerate() {
            let p = v[idx].norm_sqr();
            for x in 0..m {
                for y in 0..m {
                    if s & (1 << x) != 0 && s & (1 << y) != 0 {
                        nn[x * m + y] += p;
                    }
                }
            }
        }
        (e0, nn)
    }

    #[test]
    fn matches_fermionic_ed_open_chain() {
        let (e0, nn) = fermion_ed_nn(6, 2, 1.0, 0.35);
        let t = free_fermion_oracle(6, 2, 1.0, 0.35, Boundary::Open).unwrap();
        assert!((t.energy - e0).abs() < 1e-12);
        for k in 0..36 {
            assert!((t.nn[k] - nn[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn hardcore_energy_is_fermi_sea() {
        let r = fermionization_check(8, 3, 1.0, &[], Boundary::Open).unwrap();
        assert!((r.hardcore.energy - r.oracle_energy).abs() < 1e-12);
        assert!(r.hardcore.deviation < 1e-10);
        let r = fermionization_check(8, 2, 1.0, &[0.0], Boundary::Periodic).unwrap();
        assert_eq!(r.fermion_boundary, Boundary::Antiperiodic);
        assert!(r.hardcore.deviation < 1e-10);
        assert!(r.rows[0].deviation > 1e-2);
    }
}
