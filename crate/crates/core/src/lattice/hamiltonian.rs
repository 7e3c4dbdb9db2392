use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{FockBasis, Sector, DEFAULT_BASIS_CAP};
use super::operator::Operator;
use super::Boundary;
use crate::error::{Error, Result};
use crate::params::{OpticalConfig, PolaritonParams};
use crate::units::HBAR;

/// Lattice couplings in J. A hardcore species ignores its `u_same`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeParams {
    pub sites: usize,
    /// Lattice spacing a, m.
    pub spacing: f64,
    /// J_s = ħ²/(2 m_nr,s a²).
    pub hopping: [f64; 2],
    /// λ_s = ħη_s/(2a).
    #[serde(default)]
    pub lambda: [f64; 2],
    /// U_s = χ_ss/a.
    #[serde(default)]
    pub u_same: [f64; 2],
    /// U_x = χ_↑↓/a.
    #[serde(default)]
    pub u_cross: f64,
    /// W = ħΩ_0.
    #[serde(default)]
    pub w: f64,
    pub boundary: Boundary,
    #[serde(default)]
    pub hardcore: [bool; 2],
}

impl LatticeParams {
    /// Pure tight-binding chain with equal hopping for both species.
    pub fn hopping_only(sites: usize, j: f64, boundary: Boundary) -> Self {
        LatticeParams {
            sites,
            spacing: 1.0,
            hopping: [j, j],
            lambda: [0.0; 2],
            u_same: [0.0; 2],
            u_cross: 0.0,
            w: 0.0,
            boundary,
            hardcore: [false; 2],
        }
    }

    /// Sample the continuum polariton couplings on `sites` points of
    /// spacing L/`sites`.
    pub fn from_polariton(p: &PolaritonParams, cfg: &OpticalConfig, sites: usize, boundary: Boundary) -> Result<Self> {
        if sites < 2 {
            return Err(Error::Config(format!("lattice needs sites >= 2, got {sites}")));
        }
        let a = cfg.length / sites as f64;
        let lp = LatticeParams {
            sites,
            spacing: a,
            hopping: p.m_nr.map(|m| HBAR * HBAR / (2.0 * m * a * a)),
            lambda: p.eta.map(|e| HBAR * e / (2.0 * a)),
            u_same: p.chi_same.map(|c| c / a),
            u_cross: p.chi_cross[0] / a,
            w: HBAR * p.omega0,
            boundary,
            hardcore: [false; 2],
        };
        lp.validate()?;
        Ok(lp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::Config(format!("lattice needs sites >= 2, got {}", self.sites)));
        }
        if !(self.spacing.is_finite() && self.spacing > 0.0) {
            return Err(Error::Config(format!("lattice spacing must be > 0, got {}", self.spacing)));
        }
        let mut finite = vec![self.u_cross, self.w];
        finite.extend(self.hopping);
        finite.extend(self.lambda);
        for s in 0..2 {
            if !self.hardcore[s] {
                finite.push(self.u_same[s]);
            }
        }
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("lattice couplings must be finite (use the hardcore flag for U = inf)".into()));
        }
        Ok(())
    }

    /// Bonds (j, j+1, sign) including the wrapping bond when present.
    pub(crate) fn bonds(&self) -> Vec<(usize, usize, f64)> {
        let m = self.sites;
        let mut b: Vec<_> = (0..m - 1).map(|j| (j, j + 1, 1.0)).collect();
        match self.boundary {
            Boundary::Open => {}
            Boundary::Periodic => b.push((m - 1, 0, 1.0)),
            Boundary::Antiperiodic => b.push((m - 1, 0, -1.0)),
        }
        b
    }

    /// The Hamiltonian as a second-quantized [`Operator`].
    pub fn operator(&self) -> Operator {
        let m = self.sites;
        let mut h = Operator::default();
        for s in 0..2 {
            for (j, k, sign) in self.bonds() {
                let t = Complex64::new(-self.hopping[s], self.lambda[s]) * sign;
                h = h.add(&Operator::hop(s * m + k, s * m + j).scale(t));
                h = h.add(&Operator::hop(s * m + j, s * m + k).scale(t.conj()));
            }
        }
        for j in 0..m {
            for s in 0..2 {
                if !self.hardcore[s] && self.u_same[s] != 0.0 {
                    let n = Operator::number(s * m + j);
                    let nn = n.mul(&n).add(&n.clone().scale(Complex64::new(-1.0, 0.0)));
                    h = h.add(&nn.scale(Complex64::new(self.u_same[s] / 2.0, 0.0)));
                }
            }
            if self.u_cross != 0.0 {
                let nn = Operator::number(j).mul(&Operator::number(m + j));
                h = h.add(&nn.scale(Complex64::new(self.u_cross, 0.0)));
            }
            if self.w != 0.0 {
                let w = Complex64::new(self.w, 0.0);
                h = h.add(&Operator::hop(j, m + j).scale(w));
                h = h.add(&Operator::hop(m + j, j).scale(w));
            }
        }
        h
    }
}

/// Hermitian matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian {
    pub dim: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl SparseHermitian {
    /// Assemble (T + T†)/2 from raw triplets, with entry (c, r) set to the
    /// exact conjugate of entry (r, c).
    pub fn from_triplets(dim: usize, triplets: Vec<(usize, usize, Complex64)>) -> Self {
        let mut upper: Vec<(usize, usize, Complex64)> = triplets
            .into_iter()
            .map(|(r, c, v)| match r.cmp(&c) {
                std::cmp::Ordering::Less => (r, c, v * 0.5),
                std::cmp::Ordering::Greater => (c, r, v.conj() * 0.5),
                std::cmp::Ordering::Equal => (r, c, Complex64::new(v.re, 0.0)),
            })
            .collect();
        upper.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(upper.len());
        for (r, c, v) in upper {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        let mut full: Vec<(usize, usize, Complex64)> = Vec::with_capacity(2 * merged.len());
        for &(r, c, v) in &merged {
            full.push((r, c, v));
            if r != c {
                full.push((c, r, v.conj()));
            }
        }
        full.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; dim + 1];
        let mut col_idx = Vec::with_capacity(full.len());
        let mut values = Vec::with_capacity(full.len());
        for (r, c, v) in full {
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseHermitian { dim, row_ptr, col_idx, values }
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let row = &self.col_idx[self.row_ptr[r]..self.row_ptr[r + 1]];
        match row.binary_search(&c) {
            Ok(k) => self.values[self.row_ptr[r] + k],
            Err(_) => Complex64::default(),
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let row = |r: usize| {
            (self.row_ptr[r]..self.row_ptr[r + 1])
                .map(|k| self.values[k] * x[self.col_idx[k]])
                .sum::<Complex64>()
        };
        if self.dim > 4096 {
            (0..self.dim).into_par_iter().map(row).collect()
        } else {
            (0..self.dim).map(row).collect()
        }
    }

    /// Largest absolute row sum, an upper bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.values[self.row_ptr[r]..self.row_ptr[r + 1]].iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.col_idx[k])] = self.values[k];
            }
        }
        m
    }

    /// max |H_rc − conj(H_cr)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                worst = worst.max((self.values[k] - self.get(c, r).conj()).norm());
            }
        }
        worst
    }
}

/// Basis plus assembled Hamiltonian; immutable once built.
#[derive(Debug, Clone)]
pub struct FockSystem {
    pub params: LatticeParams,
    pub basis: FockBasis,
    pub hamiltonian: SparseHermitian,
}

impl FockSystem {
    pub fn new(params: LatticeParams, sector: Sector) -> Result<Self> {
        FockSystem::with_cap(params, sector, DEFAULT_BASIS_CAP)
    }

    pub fn with_cap(params: LatticeParams, sector: Sector, cap: usize) -> Result<Self> {
        params.validate()?;
        if matches!(sector, Sector::Species(_)) && params.w != 0.0 {
            return Err(Error::Config("fixed (N_up, N_down) sector requires w = 0; use a total-N sector".into()));
        }
        let basis = FockBasis::new(params.sites, sector, params.hardcore, cap)?;
        let op = params.operator();
        let m = params.sites;
        let hc = params.hardcore;
        let mut triplets = Vec::new();
        for (col, cfg) in basis.states().iter().enumerate() {
            for (v, image) in op.apply_config(cfg, m, hc) {
                if v == Complex64::default() {
                    continue;
                }
                // H conserves N_↑ + N_↓ (and each N_s when W = 0) and respects
                // the hardcore flags, so the image always lies in the basis.
                if let Some(row) = basis.index_of(&image) {
                    triplets.push((row, col, v));
                }
            }
        }
        let hamiltonian = SparseHermitian::from_triplets(basis.dim(), triplets);
        Ok(FockSystem { params, basis, hamiltonian })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn sites(&self) -> usize {
        self.params.sites
    }
}
