//! Analytic upper bounds on `||E_T - S_T||_{p→p}` for balanced schemes.

use crate::error::{Error, Result};
use crate::quantum::{HermitianOperator, SchattenP};
use crate::scalar::Real;

fn positive<T: Real>(x: T, what: &'static str) -> Result<()> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Config(format!("{what} must be positive and finite (got {x})")));
    }
    Ok(())
}

/// Two-node bound `4T/λ · sup_t(w_1 w_2) · ||ΔH||²_∞`, `ΔH = H_1 - H_2`.
pub fn bound_two_node<T: Real>(w_sup_product: T, delta_h_norm: T, horizon: T, lambda: T) -> Result<T> {
    positive(lambda, "lambda")?;
    Ok(T::lit(4.0) * horizon / lambda * w_sup_product * delta_h_norm * delta_h_norm)
}

/// `Q`-node bound `8C²T/(λ - 2C)` for `||H_i||_∞ <= C`, independent of `Q`.
pub fn bound_balanced_qnode<T: Real>(c: T, horizon: T, lambda: T) -> Result<T> {
    let denominator = lambda - T::lit(2.0) * c;
    if !(denominator > T::zero()) {
        return Err(Error::Pole { what: "lambda <= 2C", denominator: denominator.to_f64_lossy() });
    }
    Ok(T::lit(8.0) * c * c * horizon / denominator)
}

/// Imperfect-gate total `8C²T/(λ - 2C) + λTε₁`.
pub fn bound_imperfect<T: Real>(c: T, horizon: T, lambda: T, epsilon1: T) -> Result<T> {
    Ok(bound_balanced_qnode(c, horizon, lambda)? + lambda * horizon * epsilon1)
}

/// Every quantity entering the general Schatten-p bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundInputs<T> {
    pub q: usize,
    pub horizon: T,
    pub lambda: T,
    pub p: SchattenP,
    /// `||w||_p`.
    pub weights_p_norm: T,
    /// `||𝓗||_∞ = max_i ||H_i||_∞` for the block-diagonal controlled Hamiltonian.
    pub controlled_norm: T,
    /// `||𝓗 - H ⊗ 1||_∞ = max_i ||H_i - H||_∞`.
    pub spread_norm: T,
}

impl<T: Real> BoundInputs<T> {
    /// Collect the norms from explicit terms and constant weights.
    pub fn from_terms(terms: &[HermitianOperator<T>], weights: &[T], horizon: T, lambda: T, p: SchattenP) -> Result<Self> {
        let target = HermitianOperator::weighted_sum(weights, terms)?;
        let mut controlled_norm = T::zero();
        let mut spread_norm = T::zero();
        for h in terms {
            controlled_norm = controlled_norm.max(h.operator_norm());
            spread_norm = spread_norm.max(h.sub(&target)?.operator_norm());
        }
        Ok(Self {
            q: terms.len(),
            horizon,
            lambda,
            p,
            weights_p_norm: p.vector_norm(weights),
            controlled_norm,
            spread_norm,
        })
    }

    /// `Q^{(p-1)/p} ||w||_p`; equals one for `p = 1` or uniform weights.
    pub fn weight_factor(&self) -> T {
        self.p.dimension_factor::<T>(self.q) * self.weights_p_norm
    }
}

/// General bound
/// `4 Q^{(p-1)/p} ||w||_p ||𝓗 - H⊗1||_∞ ||𝓗||_∞ T / (λ - 2 Q^{(p-1)/p} ||𝓗||_∞ ||w||_p)`.
pub fn bound_general_p<T: Real>(inputs: &BoundInputs<T>) -> Result<T> {
    positive(inputs.lambda, "lambda")?;
    let factor = inputs.weight_factor();
    let denominator = inputs.lambda - T::lit(2.0) * factor * inputs.controlled_norm;
    if !(denominator > T::zero()) {
        return Err(Error::Pole { what: "lambda <= 2 Q^((p-1)/p) ||w||_p ||H||", denominator: denominator.to_f64_lossy() });
    }
    Ok(T::lit(4.0) * factor * inputs.spread_norm * inputs.controlled_norm * inputs.horizon / denominator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{pauli_to_dense, PauliTerm};

    #[test]
    fn two_node_values() {
        assert_eq!(bound_two_node(0.25, 0.0, 1.0, 20.0).unwrap(), 0.0);
        let b = bound_two_node(0.25, 2f64.sqrt(), 1.0, 20.0).unwrap();
        assert!((b - 0.1).abs() < 1e-15);
        let half = bound_two_node(0.25, 2f64.sqrt(), 1.0, 40.0).unwrap();
        assert!((half - b / 2.0).abs() < 1e-16);
        assert!(bound_two_node(0.25, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn qnode_values_and_pole() {
        assert!((bound_balanced_qnode(1.0f64, 1.0, 42.0).unwrap() - 0.2).abs() < 1e-15);
        assert!((bound_balanced_qnode(1.0f64, 1.0, 10.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(bound_balanced_qnode(1.0, 1.0, 2.0), Err(Error::Pole { .. })));
        let near = bound_balanced_qnode(1.0, 1.0, 2.0 + 1e-9).unwrap();
        assert!(near > 1e9);
    }

    #[test]
    fn general_reduces_to_qnode() {
        for (q, p) in [(3, SchattenP::One), (4, SchattenP::Two), (2, SchattenP::Inf)] {
            let w = vec![1.0 / q as f64; q];
            let inputs = BoundInputs {
                q,
                horizon: 1.3,
                lambda: 17.0,
                p,
                weights_p_norm: p.vector_norm(&w),
                controlled_norm: 0.8,
                spread_norm: 1.6,
            };
            assert!((inputs.weight_factor() - 1.0).abs() < 1e-15);
            let g = bound_general_p(&inputs).unwrap();
            let qn = bound_balanced_qnode(0.8, 1.3, 17.0).unwrap();
            assert!((g - qn).abs() < 1e-12, "{q} {p}: {g} vs {qn}");
        }
    }

    #[test]
    fn from_terms_two_node() {
        let x = pauli_to_dense(&[PauliTerm::new(1.0, "X")], 1).unwrap();
        let z = pauli_to_dense(&[PauliTerm::new(1.0, "Z")], 1).unwrap();
        let inputs = BoundInputs::from_terms(&[x, z], &[0.5f64, 0.5], 1.0, 20.0, SchattenP::One).unwrap();
        assert!((inputs.controlled_norm - 1.0).abs() < 1e-14);
        // H_1 - H = (X - Z)/2, norm sqrt(2)/2
        assert!((inputs.spread_norm - 2f64.sqrt() / 2.0).abs() < 1e-14);
        let g = bound_general_p(&inputs).unwrap();
        let two = bound_two_node(0.25, 2f64.sqrt(), 1.0, 20.0).unwrap();
        assert!(g >= two);
    }

    #[test]
    fn single_precision() {
        let b: f32 = bound_balanced_qnode(1.0f32, 1.0, 42.0).unwrap();
        assert!((b - 0.2).abs() < 1e-6);
    }
}
