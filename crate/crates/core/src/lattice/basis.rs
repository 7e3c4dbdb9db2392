use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BASIS_CAP: usize = 2_000_000;

/// Particle-number constraint defining a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    /// N_↑ + N_↓ = N.
    Total(usize),
    /// Fixed (N_↑, N_↓).
    Species([usize; 2]),
    /// Every N_↑ + N_↓ ≤ N; used for commutator checks.
    UpTo(usize),
}

/// Occupation-number basis over 2M bosonic modes in ascending
/// lexicographic order of the occupation vectors.
#[derive(Debug, Clone)]
pub struct FockBasis {
    sites: usize,
    hardcore: [bool; 2],
    sector: Sector,
    states: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// Ways to place `k` particles of one species on `m` sites.
fn species_count(m: usize, k: usize, hardcore: bool) -> u128 {
    if hardcore {
        binom(m as u128, k as u128)
    } else if m == 0 {
        u128::from(k == 0)
    } else {
        binom((m + k - 1) as u128, k as u128)
    }
}

fn total_count(m: usize, n: usize, hardcore: [bool; 2]) -> u128 {
    (0..=n)
        .map(|k| species_count(m, k, hardcore[0]).saturating_mul(species_count(m, n - k, hardcore[1])))
        .fold(0u128, |a, b| a.saturating_add(b))
}

/// Dimension of the basis without enumerating it.
pub fn basis_dimension(sites: usize, sector: Sector, hardcore: [bool; 2]) -> u128 {
    match sector {
        Sector::Total(n) => total_count(sites, n, hardcore),
        Sector::Species([a, b]) => {
            species_count(sites, a, hardcore[0]).saturating_mul(species_count(sites, b, hardcore[1]))
        }
        Sector::UpTo(n) => (0..=n).map(|k| total_count(sites, k, hardcore)).fold(0, u128::saturating_add),
    }
}

struct Enumerator<'a> {
    sites: usize,
    hardcore: [bool; 2],
    sector: Sector,
    current: Vec<u8>,
    out: &'a mut Vec<Vec<u8>>,
}

impl Enumerator<'_> {
    fn species_limit(&self, s: usize) -> usize {
        match self.sector {
            Sector::Total(n) | Sector::UpTo(n) => n,
            Sector::Species(target) => target[s],
        }
    }

    /// Particles that modes `from..` of species `s` can still absorb.
    fn capacity(&self, s: usize, from: usize) -> usize {
        let end = (s + 1) * self.sites;
        let modes = end.saturating_sub(from.max(s * self.sites));
        if self.hardcore[s] {
            modes
        } else if modes > 0 {
            usize::MAX
        } else {
            0
        }
    }

    fn feasible(&self, mode: usize, used: [usize; 2]) -> bool {
        match self.sector {
            Sector::Total(n) => {
                let total = used[0] + used[1];
                total <= n && {
                    let cap = self.capacity(0, mode).saturating_add(self.capacity(1, mode));
                    n - total <= cap
                }
            }
            Sector::Species(target) => (0..2).all(|s| used[s] <= target[s] && target[s] - used[s] <= self.capacity(s, mode)),
            Sector::UpTo(n) => used[0] + used[1] <= n,
        }
    }

    fn run(&mut self, mode: usize, used: [usize; 2]) {
        if !self.feasible(mode, used) {
            return;
        }
        if mode == 2 * self.sites {
            self.out.push(self.current.clone());
            return;
        }
        let s = mode / self.sites;
        let limit = if self.hardcore[s] { 1 } else { self.species_limit(s) };
        for occ in 0..=limit {
            let mut next = used;
            next[s] += occ;
            self.current[mode] = occ as u8;
            self.run(mode + 1, next);
        }
        self.current[mode] = 0;
    }
}

impl FockBasis {
    pub fn new(sites: usize, sector: Sector, hardcore: [bool; 2], cap: usize) -> Result<Self> {
        if sites == 0 {
            return Err(Error::Config("lattice needs at least one site".into()));
        }
        let n_max = match sector {
            Sector::Total(n) | Sector::UpTo(n) => n,
            Sector::Species([a, b]) => a + b,
        };
        if n_max > u8::MAX as usize - 1 {
            return Err(Error::Config(format!("particle number {n_max} too large for an occupation basis")));
        }
        let dimension = basis_dimension(sites, sector, hardcore);
        if dimension > cap as u128 {
            return Err(Error::BasisTooLarge { dimension, cap });
        }
        let mut states = Vec::with_capacity(dimension as usize);
        Enumerator { sites, hardcore, sector, current: vec![0; 2 * sites], out: &mut states }.run(0, [0, 0]);
        debug_assert_eq!(states.len() as u128, dimension);
        let index = states.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        Ok(FockBasis { sites, hardcore, sector, states, index })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn hardcore(&self) -> [bool; 2] {
        self.hardcore
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> &[u8] {
        &self.states[i]
    }

    pub fn states(&self) -> &[Vec<u8>] {
        &self.states
    }

    pub fn index_of(&self, config: &[u8]) -> Option<usize> {
        self.index.get(config).copied()
    }
}
