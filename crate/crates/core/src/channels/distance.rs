//! Bias norms and lower bounds on the induced 1→1 distance between channels.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{Channel, TransferMatrix};
use crate::error::Result;
use crate::quantum::matrix::vector_norm;
use crate::quantum::operators::same_dim;
use crate::quantum::{schatten_norm, trace_norm, SchattenP};
use crate::rng::{stream, AUX_STREAM};
use crate::{Matrix, State};

/// `||exact - averaged||_p`.
pub fn bias_norm(exact: &State, averaged: &State, p: SchattenP) -> Result<f64> {
    same_dim(exact.dim(), averaged.dim())?;
    schatten_norm(&(exact.matrix() - averaged.matrix()), p)
}

/// Haar-random unit vector from a normalized complex Gaussian.
pub fn haar_state(dim: usize, rng: &mut impl Rng) -> Vec<Complex<f64>> {
    loop {
        let v: Vec<Complex<f64>> = (0..dim)
            .map(|_| Complex::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let n = vector_norm(&v);
        if n > 0.0 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceOptions {
    pub samples: usize,
    pub refinement_steps: usize,
    pub seed: u64,
}

impl DistanceOptions {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, refinement_steps: 50, seed }
    }
}

#[derive(Debug, Clone)]
pub struct DistanceEstimate {
    /// `max_ψ ||(A - B)(|ψ><ψ|)||_1` over every state tried.
    pub value: f64,
    /// Best value among the random samples alone, before refinement.
    pub sampled: f64,
    pub state: Vec<Complex<f64>>,
}

fn objective(diff: &Matrix, psi: &[Complex<f64>]) -> Result<f64> {
    let out = Matrix::from_row_major(diff.matvec(Matrix::outer(psi).as_slice()))?;
    trace_norm(&out)
}

/// Lower bound on `||A - B||_{1→1}` from Haar-random pure inputs followed by
/// a random local search around the best one.
///
/// Both channels are tabulated once as transfer matrices, so each trial
/// costs one `d²×d²` product.
pub fn channel_distance_lb(a: &dyn Channel, b: &dyn Channel, opts: &DistanceOptions) -> Result<DistanceEstimate> {
    same_dim(a.dim(), b.dim())?;
    let d = a.dim();
    let ta = TransferMatrix::from_channel(a)?;
    let tb = TransferMatrix::from_channel(b)?;
    let diff = ta.matrix() - tb.matrix();

    let trials: Vec<(f64, Vec<Complex<f64>>)> = (0..opts.samples.max(1))
        .into_par_iter()
        .map(|k| {
            let psi = haar_state(d, &mut stream(opts.seed, k as u64));
            Ok((objective(&diff, &psi)?, psi))
        })
        .collect::<Result<_>>()?;
    // first maximum in index order, independent of scheduling
    let (mut best, mut psi) = trials.into_iter().fold((f64::NEG_INFINITY, Vec::new()), |acc, t| if t.0 > acc.0 { t } else { acc });
    let sampled = best;

    let mut rng = stream(opts.seed, AUX_STREAM);
    let mut sigma = 0.1;
    for _ in 0..opts.refinement_steps {
        let step = haar_state(d, &mut rng);
        let cand: Vec<_> = psi.iter().zip(&step).map(|(p, s)| p + s * sigma).collect();
        let n = vector_norm(&cand);
        let cand: Vec<_> = cand.into_iter().map(|z| z / n).collect();
        let v = objective(&diff, &cand)?;
        if v > best {
            best = v;
            psi = cand;
            sigma *= 1.2;
        } else {
            sigma *= 0.7;
        }
    }
    Ok(DistanceEstimate { value: best, sampled, state: psi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{IdentityChannel, UnitaryChannel};
    use crate::quantum::{pauli_to_dense, PauliTerm};
    use crate::Unitary;

    #[test]
    fn equal_channels_have_zero_distance() {
        let h = pauli_to_dense(&[PauliTerm::new(1.0, "XZ")], 2).unwrap();
        let c = UnitaryChannel::new(h.exp(0.4));
        let est = channel_distance_lb(&c, &c.clone(), &DistanceOptions::new(20, 1)).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn identity_vs_bit_flip_reaches_two() {
        let x = pauli_to_dense(&[PauliTerm::new(1.0, "X")], 1).unwrap();
        let flip = UnitaryChannel::new(Unitary::new(x.into_matrix()).unwrap());
        let est = channel_distance_lb(&IdentityChannel { dim: 2 }, &flip, &DistanceOptions::new(200, 3)).unwrap();
        assert!(est.value <= 2.0 + 1e-12);
        assert!(est.value > 1.99, "{}", est.value);
        assert!(est.value >= est.sampled);
    }

    #[test]
    fn haar_states_are_normalized_and_reproducible() {
        let a = haar_state(4, &mut stream(9, 2));
        let b = haar_state(4, &mut stream(9, 2));
        assert_eq!(a, b);
        assert!((vector_norm(&a) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bias_norm_of_identical_states_is_zero() {
        let s = State::maximally_mixed(4).unwrap();
        for p in SchattenP::ALL {
            assert_eq!(bias_norm(&s, &s, p).unwrap(), 0.0);
        }
    }
}
