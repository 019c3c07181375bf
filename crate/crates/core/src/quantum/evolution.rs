//! Matrix exponentials and time-ordered evolution.

use super::matrix::CMatrix;
use super::norms::operator_norm;
use super::operators::{HermitianOperator, UnitaryOperator};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tolerances::TOLERANCES;

/// `e^{-iHt}` by spectral decomposition. Fails if `h` is not Hermitian.
pub fn matexp_hermitian<T: Real>(h: &CMatrix<T>, t: T) -> Result<UnitaryOperator<T>> {
    if !t.is_finite() {
        return Err(Error::NonFinite("evolution time"));
    }
    let h = HermitianOperator::new(h.clone())?;
    Ok(h.exp(t))
}

/// Midpoint product `prod_k e^{-i H(t_k + δ/2) δ}` over `steps` equal slices
/// of `[t0, t1]`, latest slice leftmost.
pub fn time_ordered_unitary<T, F>(h: F, t0: T, t1: T, steps: usize) -> Result<UnitaryOperator<T>>
where
    T: Real,
    F: Fn(T) -> Result<HermitianOperator<T>>,
{
    if !(t1 >= t0) {
        return Err(Error::Config(format!("time_ordered_unitary needs t1 >= t0 (got {t0} .. {t1})")));
    }
    if steps == 0 {
        return Err(Error::Config("time_ordered_unitary needs at least one step".into()));
    }
    let delta = (t1 - t0) / T::lit(steps as f64);
    let half = T::lit(0.5);
    let mut u: Option<UnitaryOperator<T>> = None;
    for k in 0..steps {
        let mid = t0 + (T::lit(k as f64) + half) * delta;
        let step = h(mid)?.exp(delta);
        u = Some(match u {
            None => step,
            Some(acc) => acc.followed_by(&step),
        });
    }
    Ok(u.expect("steps >= 1"))
}

/// Result of [`time_ordered_converged`].
#[derive(Debug, Clone)]
pub struct ConvergedUnitary<T> {
    pub unitary: UnitaryOperator<T>,
    pub steps: usize,
    /// Operator-norm change between the last two step counts.
    pub last_change: T,
}

/// Double the midpoint step count from `initial_steps` until the result moves
/// by less than `tol` in operator norm. Gives up after `max_doublings`.
pub fn time_ordered_converged<T, F>(
    h: F,
    t0: T,
    t1: T,
    initial_steps: usize,
    tol: T,
    max_doublings: usize,
) -> Result<ConvergedUnitary<T>>
where
    T: Real,
    F: Fn(T) -> Result<HermitianOperator<T>>,
{
    let mut steps = initial_steps.max(1);
    let mut prev = time_ordered_unitary(&h, t0, t1, steps)?;
    let mut last_change = T::infinity();
    for _ in 0..max_doublings {
        steps *= 2;
        let next = time_ordered_unitary(&h, t0, t1, steps)?;
        last_change = operator_norm(&(next.matrix() - prev.matrix()))?;
        prev = next;
        if last_change < tol {
            return Ok(ConvergedUnitary { unitary: prev, steps, last_change });
        }
    }
    Err(Error::NonConvergence {
        what: "time-ordered exponential",
        last_change: last_change.to_f64_lossy(),
        iterations: max_doublings,
    })
}

/// Default tolerance for [`time_ordered_converged`].
pub fn default_time_ordered_tol<T: Real>() -> T {
    T::tol(TOLERANCES.time_ordered, T::one())
}
