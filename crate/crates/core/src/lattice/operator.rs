use std::collections::BTreeMap;

use num_complex::Complex64;

use super::basis::FockBasis;
use super::QuantumState;

/// A single creation or annihilation operator on mode `s·M + j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

impl Ladder {
    fn adjoint(self) -> Ladder {
        match self {
            Ladder::Create(m) => Ladder::Annihilate(m),
            Ladder::Annihilate(m) => Ladder::Create(m),
        }
    }
}

/// Linear combination of normal- or anti-normal-ordered ladder products.
/// Each product acts right to left.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Operator {
    pub terms: Vec<(Complex64, Vec<Ladder>)>,
}

impl Operator {
    pub fn identity() -> Self {
        Operator { terms: vec![(Complex64::new(1.0, 0.0), Vec::new())] }
    }

    pub fn monomial(coeff: Complex64, ladders: Vec<Ladder>) -> Self {
        Operator { terms: vec![(coeff, ladders)] }
    }

    /// b†_a b_b.
    pub fn hop(to: usize, from: usize) -> Self {
        Operator::monomial(Complex64::new(1.0, 0.0), vec![Ladder::Create(to), Ladder::Annihilate(from)])
    }

    pub fn number(mode: usize) -> Self {
        Operator::hop(mode, mode)
    }

    pub fn scale(mut self, c: Complex64) -> Self {
        self.terms.iter_mut().for_each(|(k, _)| *k *= c);
        self
    }

    pub fn add(mut self, other: &Operator) -> Self {
        self.terms.extend(other.terms.iter().cloned());
        self
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Operator) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, la) in &self.terms {
            for (b, lb) in &other.terms {
                let mut l = la.clone();
                l.extend_from_slice(lb);
                terms.push((a * b, l));
            }
        }
        Operator { terms }
    }

    pub fn adjoint(&self) -> Self {
        Operator {
            terms: self
                .terms
                .iter()
                .map(|(c, l)| (c.conj(), l.iter().rev().map(|x| x.adjoint()).collect()))
                .collect(),
        }
    }

    /// Image of one occupation configuration. Hardcore species refuse a
    /// second particle on a mode.
    pub fn apply_config(&self, config: &[u8], sites: usize, hardcore: [bool; 2]) -> Vec<(Complex64, Vec<u8>)> {
        let mut out = Vec::with_capacity(self.terms.len());
        'terms: for (coeff, ladders) in &self.terms {
            let mut c = config.to_vec();
            let mut amp = 1.0;
            for l in ladders.iter().rev() {
                match *l {
                    Ladder::Annihilate(m) => {
                        if c[m] == 0 {
                            continue 'terms;
                        }
                        amp *= f64::from(c[m]).sqrt();
                        c[m] -= 1;
                    }
                    Ladder::Create(m) => {
                        if (hardcore[m / sites] && c[m] >= 1) || c[m] == u8::MAX {
                            continue 'terms;
                        }
                        c[m] += 1;
                        amp *= f64::from(c[m]).sqrt();
                    }
                }
            }
            out.push((coeff * amp, c));
        }
        out
    }

    /// O|ψ⟩ as a map from configuration to amplitude; configurations may
    /// leave the basis.
    pub fn apply(&self, basis: &FockBasis, state: &QuantumState) -> BTreeMap<Vec<u8>, Complex64> {
        let mut out = BTreeMap::new();
        for (i, amp) in state.amplitudes.iter().enumerate() {
            if *amp == Complex64::default() {
                continue;
            }
            for (c, cfg) in self.apply_config(basis.state(i), basis.sites(), basis.hardcore()) {
                *out.entry(cfg).or_insert(Complex64::default()) += amp * c;
            }
        }
        out
    }

    /// ⟨ψ|O|ψ⟩.
    pub fn expectation(&self, basis: &FockBasis, state: &QuantumState) -> Complex64 {
        let mut acc = Complex64::default();
        for (i, amp) in state.amplitudes.iter().enumerate() {
            if *amp == Complex64::default() {
                continue;
            }
            for (c, cfg) in self.apply_config(basis.state(i), basis.sites(), basis.hardcore()) {
                if let Some(k) = basis.index_of(&cfg) {
                    acc += state.amplitudes[k].conj() * c * amp;
                }
            }
        }
        acc
    }
}
