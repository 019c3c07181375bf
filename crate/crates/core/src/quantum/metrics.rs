use num_complex::Complex;

use super::eigen::eigh;
use super::matrix::inner;
use super::norms::trace_norm;
use super::operators::{same_dim, DensityMatrix};
use crate::error::Result;
use crate::scalar::Real;

/// Distance and fidelity between two states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateMetrics<T> {
    /// `½ ||rho - sigma||_1`.
    pub trace_distance: T,
    /// `(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
    pub fidelity: T,
    /// Whether one of the arguments was detected as pure.
    pub pure_reference: bool,
}

impl<T: Real> StateMetrics<T> {
    /// `1 - F <= D`, which must hold whenever one state is pure.
    pub fn fuchs_van_de_graaf_holds(&self, slack: T) -> bool {
        T::one() - self.fidelity <= self.trace_distance + slack
    }
}

pub fn state_metrics<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<StateMetrics<T>> {
    same_dim(rho.dim(), sigma.dim())?;
    let diff = rho.matrix() - sigma.matrix();
    let trace_distance = T::lit(0.5) * trace_norm(&diff)?;
    let (fidelity, pure_reference) = if let Some(psi) = rho.pure_vector() {
        (expectation(sigma, &psi), true)
    } else if let Some(phi) = sigma.pure_vector() {
        (expectation(rho, &phi), true)
    } else {
        (mixed_fidelity(rho, sigma), false)
    };
    Ok(StateMetrics { trace_distance, fidelity: fidelity.max(T::zero()).min(T::one()), pure_reference })
}

/// `<psi| rho |psi>`.
fn expectation<T: Real>(rho: &DensityMatrix<T>, psi: &[Complex<T>]) -> T {
    inner(psi, &rho.matrix().matvec(psi)).re
}

fn mixed_fidelity<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> T {
    let sqrt_rho = eigh(rho.matrix()).map_spectrum(|l| Complex::new(l.max(T::zero()).sqrt(), T::zero()));
    let inner = sqrt_rho.matmul(sigma.matrix()).matmul(&sqrt_rho);
    let root_sum: T = eigh(&inner).values.into_iter().map(|l| l.max(T::zero()).sqrt()).sum();
    root_sum * root_sum
}
