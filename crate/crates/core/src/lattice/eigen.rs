use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{FockSystem, SparseHermitian};
use super::{l2, QuantumState};
use crate::error::{Error, Result};

/// Dimension up to which the dense solver is used under [`EigenMethod::Auto`].
pub const DENSE_LIMIT: usize = 2000;
const KRYLOV: usize = 80;
const MAX_RESTARTS: usize = 400;
const START_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenMethod {
    #[default]
    Auto,
    Dense,
    Lanczos,
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: QuantumState,
    /// ‖Hv − E0 v‖.
    pub residual: f64,
    /// Row-sum bound on ‖H‖ used for the convergence test.
    pub norm_bound: f64,
}

pub fn ground_state(system: &FockSystem) -> Result<GroundState> {
    ground_state_with(system, EigenMethod::Auto)
}

/// Lowest eigenpair with ‖Hv − E0 v‖ ≤ 1e-10·‖H‖. In a degenerate ground
/// space any unit vector is acceptable; the returned phase makes the largest
/// component real and positive.
pub fn ground_state_with(system: &FockSystem, method: EigenMethod) -> Result<GroundState> {
    let h = &system.hamiltonian;
    if h.dim == 0 {
        return Err(Error::Domain("empty basis".into()));
    }
    let bound = h.norm_bound();
    let tol = 1e-10 * bound.max(f64::MIN_POSITIVE);
    let dense = match method {
        EigenMethod::Auto => h.dim <= DENSE_LIMIT,
        EigenMethod::Dense => true,
        EigenMethod::Lanczos => false,
    };
    let (energy, mut v) = if dense { dense_ground(h) } else { lanczos(h, tol)? };
    fix_phase(&mut v);
    let residual = residual(h, energy, &v);
    if residual > tol {
        return Err(Error::NoConvergence(format!(
            "ground-state residual {residual:e} exceeds {tol:e}"
        )));
    }
    Ok(GroundState { energy, state: QuantumState::new(v)?, residual, norm_bound: bound })
}

fn dense_ground(h: &SparseHermitian) -> (f64, Vec<Complex64>) {
    let eig = h.to_dense().symmetric_eigen();
    let (k, e) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &e)| if e < best.1 { (i, e) } else { best });
    (e, eig.eigenvectors.column(k).iter().copied().collect())
}

fn residual(h: &SparseHermitian, e: f64, v: &[Complex64]) -> f64 {
    let hv = h.matvec(v);
    hv.iter().zip(v).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>().sqrt()
}

fn fix_phase(v: &mut [Complex64]) {
    let mut best = 0;
    for (i, c) in v.iter().enumerate() {
        if c.norm() > v[best].norm() * (1.0 + 1e-12) {
            best = i;
        }
    }
    let ph = v[best].conj() / v[best].norm();
    v.iter_mut().for_each(|c| *c *= ph);
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Restarted Lanczos with full reorthogonalization; each cycle restarts from
/// the current Ritz vector.
fn lanczos(h: &SparseHermitian, tol: f64) -> Result<(f64, Vec<Complex64>)> {
    let n = h.dim;
    let mut start = QuantumState::random(n, START_SEED)?.amplitudes;
    let kmax = KRYLOV.min(n);
    let mut last_res = f64::INFINITY;
    for _ in 0..MAX_RESTARTS {
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alpha = Vec::with_capacity(kmax);
        let mut beta: Vec<f64> = Vec::with_capacity(kmax);
        for j in 0..kmax {
            let mut w = h.matvec(&basis[j]);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = l2(&w);
            if j + 1 == kmax || b <= 1e-14 * (a.abs() + 1.0) {
                break;
            }
            beta.push(b);
            basis.push(w.into_iter().map(|x| x / b).collect());
        }
        let m = alpha.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = t.symmetric_eigen();
        let (k, e) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, &e)| if e < best.1 { (i, e) } else { best });
        let y = eig.eigenvectors.column(k);
        let mut ritz = vec![Complex64::default(); n];
        for (q, &c) in basis.iter().zip(y.iter()) {
            ritz.iter_mut().zip(q).for_each(|(r, x)| *r += x * c);
        }
        let norm = l2(&ritz);
        ritz.iter_mut().for_each(|r| *r /= norm);
        last_res = residual(h, e, &ritz);
        if last_res <= tol {
            return Ok((e, ritz));
        }
        start = ritz;
    }
    Err(Error::NoConvergence(format!(
        "Lanczos stalled at residual {last_res:e} after {MAX_RESTARTS} restarts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Boundary, LatticeParams, Sector};

    #[test]
    fn bloch_ground_state() {
        let sys = FockSystem::new(LatticeParams::hopping_only(8, 1.5, Boundary::Periodic), Sector::Species([1, 0])).unwrap();
        let g = ground_state(&sys).unwrap();
        assert!((g.energy + 3.0).abs() < 1e-12);
        for a in &g.state.amplitudes {
            assert!((a.re - 8f64.sqrt().recip()).abs() < 1e-10);
        }
    }

    #[test]
    fn lanczos_matches_dense() {
        let mut p = LatticeParams::hopping_only(5, 1.0, Boundary::Periodic);
        p.lambda = [0.2, -0.3];
        p.u_same = [3.0, 1.0];
        p.u_cross = 0.5;
        p.w = 0.3;
        let sys = FockSystem::new(p, Sector::Total(3)).unwrap();
        let d = ground_state_with(&sys, EigenMethod::Dense).unwrap();
        let l = ground_state_with(&sys, EigenMethod::Lanczos).unwrap();
        assert!((d.energy - l.energy).abs() < 1e-10 * d.norm_bound);
        let overlap = dot(&d.state.amplitudes, &l.state.amplitudes).norm();
        assert!((overlap - 1.0).abs() < 1e-8);
    }
}
