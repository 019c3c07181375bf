//! Comparison compilers: qDRIFT and first-order product formulas.
//!
//! Both emit [`GateSequence`]s, so they are evaluated by the same channel
//! and cost machinery as the chain compiler.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::compiler::{Gate, GateSequence};
use crate::error::{Error, Result};
use crate::quantum::operators::same_dim;
use crate::{Hamiltonian, SpectralF64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineKind {
    Qdrift,
    Trotter1Det,
    Trotter1Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineConfig {
    pub kind: BaselineKind,
    #[serde(rename = "N")]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorOrder {
    Fixed,
    RandomPermutation,
}

fn check_terms(terms: &[Hamiltonian], n: usize) -> Result<()> {
    let first = terms.first().ok_or_else(|| Error::Config("no Hamiltonian terms".into()))?;
    for h in terms {
        same_dim(first.dim(), h.dim())?;
    }
    if n == 0 {
        return Err(Error::Config("N must be at least 1".into()));
    }
    Ok(())
}

/// Precomputed qDRIFT sampling data for `H = Σ_j H_j`.
#[derive(Debug, Clone)]
pub struct Qdrift {
    spectra: Vec<SpectralF64>,
    norms: Vec<f64>,
    c: f64,
}

impl Qdrift {
    pub fn new(terms: &[Hamiltonian]) -> Result<Self> {
        check_terms(terms, 1)?;
        let norms: Vec<f64> = terms.iter().map(|h| h.operator_norm()).collect();
        if let Some(i) = norms.iter().position(|&n| !(n > 0.0)) {
            return Err(Error::ZeroNormTerm(i));
        }
        let c = norms.iter().sum();
        Ok(Self { spectra: terms.iter().map(|h| h.spectral()).collect(), norms, c })
    }

    /// Sampling probabilities `h_j / c`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.norms.iter().map(|n| n / self.c).collect()
    }

    /// `c = Σ_j ||H_j||_∞`.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn sample_index(&self, rng: &mut impl Rng) -> usize {
        let u = rng.random::<f64>() * self.c;
        let mut acc = 0.0;
        for (j, n) in self.norms.iter().enumerate() {
            acc += n;
            if u < acc {
                return j;
            }
        }
        self.norms.len() - 1
    }

    /// `N` segments `e^{-i H_j cT/(N h_j)}` with `j ~ h_j/c`.
    pub fn sequence(&self, horizon: f64, n: usize, rng: &mut impl Rng) -> Result<GateSequence> {
        if n == 0 {
            return Err(Error::Config("N must be at least 1".into()));
        }
        let gates = (0..n)
            .map(|_| {
                let j = self.sample_index(rng);
                let dwell = self.c * horizon / (n as f64 * self.norms[j]);
                Gate { node: j, dwell, unitary: self.spectra[j].evolution(dwell) }
            })
            .collect();
        Ok(GateSequence { gates, total_time: horizon })
    }
}

pub fn qdrift_sequence(terms: &[Hamiltonian], horizon: f64, n: usize, rng: &mut impl Rng) -> Result<GateSequence> {
    Qdrift::new(terms)?.sequence(horizon, n, rng)
}

/// `N` repetitions of `Π_i e^{-i w_i H_i T/N}`.
pub fn trotter1_sequence(
    terms: &[Hamiltonian],
    weights: &[f64],
    horizon: f64,
    n: usize,
    order: FactorOrder,
    rng: &mut impl Rng,
) -> Result<GateSequence> {
    check_terms(terms, n)?;
    if weights.len() != terms.len() {
        return Err(Error::DimensionMismatch { expected: terms.len(), got: weights.len() });
    }
    let dt = horizon / n as f64;
    let unitaries: Vec<_> = terms.iter().zip(weights).map(|(h, w)| h.exp(w * dt)).collect();
    let mut idx: Vec<usize> = (0..terms.len()).collect();
    let mut gates = Vec::with_capacity(n * terms.len());
    for _ in 0..n {
        if order == FactorOrder::RandomPermutation {
            idx.shuffle(rng);
        }
        for &i in &idx {
            gates.push(Gate { node: i, dwell: weights[i] * dt, unitary: unitaries[i].clone() });
        }
    }
    Ok(GateSequence { gates, total_time: horizon })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{pauli_to_dense, PauliTerm};
    use crate::rng::stream;

    fn pauli(c: f64, word: &str) -> Hamiltonian {
        pauli_to_dense(&[PauliTerm::new(c, word)], word.len()).unwrap()
    }

    #[test]
    fn single_term_qdrift_is_exact() {
        let h = pauli(0.5, "Y");
        let seq = qdrift_sequence(std::slice::from_ref(&h), 2.0, 7, &mut stream(0, 0)).unwrap();
        assert_eq!(seq.len(), 7);
        let u = seq.product().unwrap();
        assert!(u.matrix().max_abs_diff(h.exp(2.0).matrix()) < 1e-13);
    }

    #[test]
    fn qdrift_expected_generator() {
        // E[dwell_j H_j] per segment = Σ_j (h_j/c)(cT/(N h_j)) H_j = (T/N) Σ H_j
        let terms = [pauli(1.0, "X"), pauli(3.0, "Z")];
        let q = Qdrift::new(&terms).unwrap();
        let p = q.probabilities();
        let mut expected = Hamiltonian::zero(2).unwrap();
        for (j, h) in terms.iter().enumerate() {
            let dwell = q.c() * 1.0 / (4.0 * h.operator_norm());
            expected = expected.add(&h.scale(p[j] * dwell)).unwrap();
        }
        let target = terms[0].add(&terms[1]).unwrap().scale(0.25);
        assert!(expected.matrix().max_abs_diff(target.matrix()) < 1e-15);
    }

    #[test]
    fn zero_norm_rejected() {
        let terms = [pauli(1.0, "X"), Hamiltonian::zero(2).unwrap()];
        assert!(matches!(Qdrift::new(&terms), Err(Error::ZeroNormTerm(1))));
    }

    #[test]
    fn commuting_trotter_is_exact() {
        let terms = [pauli(1.0, "ZI"), pauli(0.7, "IZ")];
        let w = [0.4, 0.6];
        let seq = trotter1_sequence(&terms, &w, 1.0, 3, FactorOrder::Fixed, &mut stream(0, 0)).unwrap();
        let exact = Hamiltonian::weighted_sum(&w, &terms).unwrap().exp(1.0);
        assert!(seq.product().unwrap().matrix().max_abs_diff(exact.matrix()) < 1e-14);
    }

    #[test]
    fn random_order_permutes_each_repetition() {
        let terms = [pauli(1.0, "X"), pauli(1.0, "Y"), pauli(1.0, "Z")];
        let seq = trotter1_sequence(&terms, &[0.2, 0.3, 0.5], 1.0, 50, FactorOrder::RandomPermutation, &mut stream(4, 0)).unwrap();
        assert_eq!(seq.len(), 150);
        let firsts: std::collections::BTreeSet<_> = seq.gates.chunks(3).map(|c| c[0].node).collect();
        assert!(firsts.len() > 1);
        for rep in seq.gates.chunks(3) {
            let mut nodes: Vec<_> = rep.iter().map(|g| g.node).collect();
            nodes.sort();
            assert_eq!(nodes, vec![0, 1, 2]);
        }
    }

    #[test]
    fn config_json() {
        let c: BaselineConfig = serde_json::from_str(r#"{"kind":"trotter1-random","N":8}"#).unwrap();
        assert_eq!(c, BaselineConfig { kind: BaselineKind::Trotter1Random, n: 8 });
    }
}
