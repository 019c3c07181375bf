//! Turning chain realizations into gate sequences, choosing `λ`, and gate
//! accounting.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::Realization;
use crate::quantum::operators::same_dim;
use crate::quantum::{DensityMatrix, HermitianOperator, Spectral, UnitaryOperator};
use crate::scalar::Real;

/// `e^{-i H_node dwell}`.
#[derive(Debug, Clone)]
pub struct Gate {
    pub node: usize,
    pub dwell: f64,
    pub unitary: UnitaryOperator<f64>,
}

/// Ordered gates; the first gate acts first.
#[derive(Debug, Clone)]
pub struct GateSequence {
    pub gates: Vec<Gate>,
    pub total_time: f64,
}

/// JSON circuit entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitEntry {
    pub node: usize,
    pub dwell: f64,
}

impl GateSequence {
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.gates.first().map(|g| g.unitary.dim())
    }

    pub fn dwells(&self) -> impl Iterator<Item = f64> + '_ {
        self.gates.iter().map(|g| g.dwell)
    }

    /// `U_k ··· U_2 U_1`.
    pub fn product(&self) -> Option<UnitaryOperator<f64>> {
        let mut it = self.gates.iter();
        let first = it.next()?.unitary.clone();
        Some(it.fold(first, |acc, g| acc.followed_by(&g.unitary)))
    }

    /// Propagate a state gate by gate.
    pub fn apply(&self, rho: &DensityMatrix<f64>) -> DensityMatrix<f64> {
        self.gates.iter().fold(rho.clone(), |r, g| r.evolve(&g.unitary))
    }

    pub fn circuit(&self) -> Vec<CircuitEntry> {
        self.gates.iter().map(|g| CircuitEntry { node: g.node, dwell: g.dwell }).collect()
    }

    /// Plain-text summary: counts and time per node.
    pub fn summary(&self, nodes: usize) -> String {
        let mut count = vec![0usize; nodes];
        let mut time = vec![0.0f64; nodes];
        for g in &self.gates {
            if g.node < nodes {
                count[g.node] += 1;
                time[g.node] += g.dwell;
            }
        }
        let mut s = String::new();
        let _ = writeln!(s, "gates: {}  total time: {}", self.gates.len(), self.total_time);
        for i in 0..nodes {
            let _ = writeln!(s, "  node {i}: {} gates, {:.6} time", count[i], time[i]);
        }
        s
    }
}

/// One unitary per segment, order preserved.
pub fn compile_sequence(realization: &Realization, hamiltonians: &[HermitianOperator<f64>]) -> Result<GateSequence> {
    let first = hamiltonians.first().ok_or_else(|| Error::Config("no Hamiltonians".into()))?;
    for h in hamiltonians {
        same_dim(first.dim(), h.dim())?;
    }
    let spectra: Vec<_> = hamiltonians.iter().map(|h| h.spectral()).collect();
    compile_with_spectra(realization, &spectra)
}

/// [`compile_sequence`] with precomputed spectral decompositions.
pub fn compile_with_spectra(realization: &Realization, spectra: &[Spectral<f64>]) -> Result<GateSequence> {
    let gates = realization
        .segments
        .iter()
        .map(|s| {
            let spec = spectra
                .get(s.node)
                .ok_or_else(|| Error::Config(format!("node {} has no Hamiltonian ({} given)", s.node, spectra.len())))?;
            Ok(Gate { node: s.node, dwell: s.dwell, unitary: spec.evolution(s.dwell) })
        })
        .collect::<Result<_>>()?;
    Ok(GateSequence { gates, total_time: realization.total })
}

/// Gate model: exact unitaries, or unitaries with per-gate error `ε₁` at a
/// `ln(1/ε₁)` cost multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorModel {
    Perfect,
    Imperfect,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaChoice<T> {
    pub lambda: T,
    pub epsilon1: Option<T>,
}

/// Total rate achieving simulation error `ε₀` (trace-distance budget `2ε₀`).
///
/// Perfect gates: `λ = 4C²T/ε₀ + 2C`.
/// Imperfect gates: `λ = 4C²T/ε₀ (1 + 1/ln(8C²T²/ε₀)) + 2C` and `ε₁` spends
/// the rest of the budget, `ε₁ = (2ε₀ - 8C²T/(λ - 2C)) / (λT)`.
pub fn lambda_for_target_error<T: Real>(c: T, horizon: T, epsilon0: T, model: ErrorModel) -> Result<LambdaChoice<T>> {
    for (v, name) in [(c, "C"), (horizon, "T"), (epsilon0, "epsilon0")] {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::Config(format!("{name} must be positive (got {v})")));
        }
    }
    let two = T::lit(2.0);
    let base = T::lit(4.0) * c * c * horizon / epsilon0;
    match model {
        ErrorModel::Perfect => Ok(LambdaChoice { lambda: base + two * c, epsilon1: None }),
        ErrorModel::Imperfect => {
            let arg = T::lit(8.0) * c * c * horizon * horizon / epsilon0;
            if !(arg > T::E()) {
                return Err(Error::Config(format!(
                    "imperfect-gate model needs 8C²T² > ε₀·e (got 8C²T²/ε₀ = {arg})"
                )));
            }
            let lambda = base * (T::one() + T::one() / arg.ln()) + two * c;
            let epsilon1 = (two * epsilon0 - T::lit(8.0) * c * c * horizon / (lambda - two * c)) / (lambda * horizon);
            Ok(LambdaChoice { lambda, epsilon1: Some(epsilon1) })
        }
    }
}

/// Gate-count model: a gate of duration `τ` costs `α + βCτ`, times
/// `ln(1/ε₁)` for imperfect gates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub epsilon1: Option<f64>,
}

impl CostModel {
    pub fn new(alpha: f64, beta: f64, c: f64, epsilon1: Option<f64>) -> Result<Self> {
        if !(alpha >= 0.0 && beta >= 0.0) {
            return Err(Error::Config(format!("alpha = {alpha}, beta = {beta} must be nonnegative")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Config(format!("C = {c} must be positive")));
        }
        if let Some(e) = epsilon1 {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::Config(format!("epsilon1 = {e} must lie in (0, 1)")));
            }
        }
        Ok(Self { alpha, beta, c, epsilon1 })
    }

    pub fn perfect(alpha: f64, beta: f64, c: f64) -> Result<Self> {
        Self::new(alpha, beta, c, None)
    }

    /// `ln(1/ε₁)`, or one for perfect gates.
    pub fn log_factor(&self) -> f64 {
        self.epsilon1.map_or(1.0, |e| (1.0 / e).ln())
    }

    /// `Σ_k (α + βC τ_k)` over realized (merged) segments.
    pub fn realized(&self, dwells: impl IntoIterator<Item = f64>) -> f64 {
        let raw: f64 = dwells.into_iter().map(|tau| self.alpha + self.beta * self.c * tau).sum();
        raw * self.log_factor()
    }

    /// Same as [`Self::realized`] from aggregate counts.
    pub fn realized_from_totals(&self, segments: f64, total_dwell: f64) -> f64 {
        (self.alpha * segments + self.beta * self.c * total_dwell) * self.log_factor()
    }

    /// Expected-count bound `T(αλ + βC)`.
    pub fn expected_bound(&self, lambda: f64, horizon: f64) -> f64 {
        horizon * (self.alpha * lambda + self.beta * self.c) * self.log_factor()
    }
}

/// `gate_cost` for a concrete sequence.
pub fn gate_cost(seq: &GateSequence, model: &CostModel) -> f64 {
    model.realized(seq.dwells())
}

/// What to do with a term of zero norm when renormalizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroNormPolicy {
    #[default]
    Reject,
    Drop,
}

/// `Σ_i H_i = Σ_i w_i H̃_i` with every `||H̃_i||_∞ = c`.
#[derive(Debug, Clone)]
pub struct Renormalized<T> {
    pub weights: Vec<T>,
    pub terms: Vec<HermitianOperator<T>>,
    /// `c = Σ_j ||H_j||_∞`.
    pub c: T,
    /// Indices of the input terms kept (all of them unless dropped).
    pub kept: Vec<usize>,
}

/// `w_i = ||H_i||/Σ_j||H_j||`, `H̃_i = (Σ_j||H_j|| / ||H_i||) H_i`.
pub fn renormalize_decomposition<T: Real>(h_list: &[HermitianOperator<T>], policy: ZeroNormPolicy) -> Result<Renormalized<T>> {
    let mut kept = Vec::new();
    let mut norms = Vec::new();
    for (i, h) in h_list.iter().enumerate() {
        let n = h.operator_norm();
        if n > T::zero() {
            kept.push(i);
            norms.push(n);
        } else if policy == ZeroNormPolicy::Reject {
            return Err(Error::ZeroNormTerm(i));
        }
    }
    if kept.is_empty() {
        return Err(Error::Config("every term has zero norm".into()));
    }
    let c: T = norms.iter().copied().sum();
    let weights = norms.iter().map(|&n| n / c).collect();
    let terms = kept.iter().zip(&norms).map(|(&i, &n)| h_list[i].scale(c / n)).collect();
    Ok(Renormalized { weights, terms, c, kept })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::Segment;
    use crate::quantum::{pauli_to_dense, PauliTerm};

    fn pauli(word: &str) -> HermitianOperator<f64> {
        pauli_to_dense(&[PauliTerm::new(1.0, word)], word.len()).unwrap()
    }

    fn realization(segs: &[(usize, f64)]) -> Realization {
        Realization {
            segments: segs.iter().map(|&(node, dwell)| Segment { node, dwell }).collect(),
            total: segs.iter().map(|s| s.1).sum(),
            candidate_events: segs.len(),
        }
    }

    #[test]
    fn single_segment() {
        let h = pauli("X").scale(0.7);
        let seq = compile_sequence(&realization(&[(0, 1.3)]), std::slice::from_ref(&h)).unwrap();
        assert_eq!(seq.len(), 1);
        assert!(seq.product().unwrap().matrix().max_abs_diff(h.exp(1.3).matrix()) < 1e-14);
    }

    #[test]
    fn identical_generators_compose_exactly() {
        let h = pauli("XZ").add(&pauli("YY")).unwrap();
        let r = realization(&[(0, 0.2), (1, 0.5), (2, 0.1), (0, 0.4)]);
        let seq = compile_sequence(&r, &[h.clone(), h.clone(), h.clone()]).unwrap();
        assert!(seq.product().unwrap().matrix().max_abs_diff(h.exp(1.2).matrix()) < 1e-13);
    }

    #[test]
    fn product_matches_left_multiplication_oracle() {
        let (x, z) = (pauli("X"), pauli("Z"));
        let segs = [(0, 0.13), (1, 0.31), (0, 0.07), (1, 0.22), (0, 0.27)];
        let seq = compile_sequence(&realization(&segs), &[x.clone(), z.clone()]).unwrap();
        let mut oracle = crate::Matrix::identity(2);
        for &(node, dwell) in &segs {
            let h = if node == 0 { &x } else { &z };
            oracle = crate::quantum::matexp_hermitian(h.matrix(), dwell).unwrap().matrix().matmul(&oracle);
        }
        assert!(seq.product().unwrap().matrix().max_abs_diff(&oracle) < 1e-14);
        let rho = DensityMatrix::basis(2, 0).unwrap();
        let via_product = rho.evolve(&seq.product().unwrap());
        assert!(seq.apply(&rho).matrix().max_abs_diff(via_product.matrix()) < 1e-14);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let r = realization(&[(0, 1.0)]);
        assert!(compile_sequence(&r, &[pauli("X"), pauli("XX")]).is_err());
        assert!(compile_sequence(&realization(&[(2, 1.0)]), &[pauli("X")]).is_err());
    }

    #[test]
    fn perfect_lambda() {
        let a = lambda_for_target_error(1.0f64, 1.0, 0.1, ErrorModel::Perfect).unwrap();
        assert!((a.lambda - 42.0).abs() < 1e-12 && a.epsilon1.is_none());
        let b = lambda_for_target_error(1.0f64, 1.0, 0.01, ErrorModel::Perfect).unwrap();
        assert!((b.lambda - 402.0).abs() < 1e-10);
    }

    #[test]
    fn imperfect_budget_identity() {
        let (c, t, e0) = (1.0f64, 1.0, 0.1);
        let a = lambda_for_target_error(c, t, e0, ErrorModel::Imperfect).unwrap();
        let e1 = a.epsilon1.unwrap();
        assert!(e1 > 0.0 && e1 < 1.0);
        let budget = 8.0 * c * c * t / (a.lambda - 2.0 * c) + a.lambda * t * e1;
        assert!((budget - 2.0 * e0).abs() < 1e-10);
        assert!(lambda_for_target_error(1.0, 0.1, 0.1, ErrorModel::Imperfect).is_err());
    }

    #[test]
    fn cost_model() {
        let m = CostModel::perfect(1.0, 1.0, 1.0).unwrap();
        let seq = compile_sequence(&realization(&[(0, 2.5)]), &[pauli("Z")]).unwrap();
        assert_eq!(gate_cost(&seq, &m), 1.0 + 2.5);
        let e = CostModel::new(1.0, 1.0, 1.0, Some((-1.0f64).exp())).unwrap();
        assert!((gate_cost(&seq, &e) - 3.5).abs() < 1e-14);
        assert!((m.expected_bound(82.0, 1.0) - 83.0).abs() < 1e-12);
        assert!(CostModel::new(1.0, 1.0, 1.0, Some(1.5)).is_err());
        assert!(CostModel::new(-1.0, 1.0, 1.0, None).is_err());
    }

    #[test]
    fn renormalize_two_terms() {
        let h = vec![pauli("X"), pauli("Z").scale(3.0)];
        let r = renormalize_decomposition(&h, ZeroNormPolicy::Reject).unwrap();
        assert!((r.weights[0] - 0.25).abs() < 1e-14 && (r.weights[1] - 0.75).abs() < 1e-14);
        assert!((r.c - 4.0).abs() < 1e-14);
        for t in &r.terms {
            assert!((t.operator_norm() - 4.0).abs() < 1e-13);
        }
    }

    #[test]
    fn renormalize_single_and_zero_terms() {
        let h = vec![pauli("Y").scale(0.5)];
        let r = renormalize_decomposition(&h, ZeroNormPolicy::Reject).unwrap();
        assert_eq!(r.weights, vec![1.0]);
        assert!(r.terms[0].matrix().max_abs_diff(h[0].matrix()) < 1e-15);
        assert!((r.c - 0.5).abs() < 1e-15);

        let with_zero = vec![pauli("X"), HermitianOperator::zero(2).unwrap()];
        assert!(matches!(renormalize_decomposition(&with_zero, ZeroNormPolicy::Reject), Err(Error::ZeroNormTerm(1))));
        let dropped = renormalize_decomposition(&with_zero, ZeroNormPolicy::Drop).unwrap();
        assert_eq!(dropped.kept, vec![0]);
    }
}
