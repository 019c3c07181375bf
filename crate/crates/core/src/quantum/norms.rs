//! Schatten norms via singular values.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::eigen::eigh;
use super::matrix::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Supported Schatten exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchattenP {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "inf")]
    Inf,
}

impl SchattenP {
    pub const ALL: [SchattenP; 3] = [SchattenP::One, SchattenP::Two, SchattenP::Inf];

    /// `Q^{(p-1)/p}`: 1 for p = 1, `sqrt(Q)` for p = 2, `Q` for p = ∞.
    pub fn dimension_factor<T: Real>(self, q: usize) -> T {
        let q = T::lit(q as f64);
        match self {
            SchattenP::One => T::one(),
            SchattenP::Two => q.sqrt(),
            SchattenP::Inf => q,
        }
    }

    /// Vector p-norm.
    pub fn vector_norm<T: Real>(self, v: &[T]) -> T {
        match self {
            SchattenP::One => v.iter().map(|x| x.abs()).sum(),
            SchattenP::Two => v.iter().map(|x| *x * *x).sum::<T>().sqrt(),
            SchattenP::Inf => v.iter().map(|x| x.abs()).fold(T::zero(), T::max),
        }
    }
}

impl fmt::Display for SchattenP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchattenP::One => "1",
            SchattenP::Two => "2",
            SchattenP::Inf => "inf",
        })
    }
}

impl FromStr for SchattenP {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" => Ok(SchattenP::One),
            "2" => Ok(SchattenP::Two),
            "inf" | "infinity" | "∞" => Ok(SchattenP::Inf),
            other => Err(Error::Config(format!("unsupported Schatten exponent {other:?}"))),
        }
    }
}

const MAX_SVD_SWEEPS: usize = 80;

/// Singular values, descending, by one-sided (Hestenes) Jacobi on columns.
pub fn singular_values<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let n = m.dim();
    // cols[j] is column j
    let mut cols: Vec<Vec<Complex<T>>> = (0..n).map(|j| m.column(j)).collect();
    let eps = T::epsilon();
    for _ in 0..MAX_SVD_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha: T = cols[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: T = cols[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma = cols[i]
                    .iter()
                    .zip(&cols[j])
                    .fold(Complex::zero(), |acc: Complex<T>, (a, b)| acc + a.conj() * b);
                let g = gamma.norm();
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Phase-align column j so the 2-column Gram matrix is real.
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let t = if zeta >= T::zero() {
                    T::one() / (zeta + (T::one() + zeta * zeta).sqrt())
                } else {
                    -T::one() / (-zeta + (T::one() + zeta * zeta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(j);
                let (ci, cj) = (&mut left[i], &mut right[0]);
                for (a, b) in ci.iter_mut().zip(cj.iter_mut()) {
                    let bj = *b * phase;
                    let ai = *a;
                    *a = ai * c - bj * s;
                    *b = ai * s + bj * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Singular values of a Hermitian matrix: absolute eigenvalues, descending.
pub fn hermitian_singular_values<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let mut sv: Vec<T> = eigh(m).values.into_iter().map(|l| l.abs()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

fn norm_from_singular_values<T: Real>(sv: &[T], p: SchattenP) -> T {
    match p {
        SchattenP::One => sv.iter().copied().sum(),
        SchattenP::Two => sv.iter().map(|s| *s * *s).sum::<T>().sqrt(),
        SchattenP::Inf => sv.iter().copied().fold(T::zero(), T::max),
    }
}

/// Schatten p-norm. Hermitian inputs (differences of states) go through the
/// eigen-solver, everything else through the Jacobi SVD.
pub fn schatten_norm<T: Real>(m: &CMatrix<T>, p: SchattenP) -> Result<T> {
    if !m.is_finite() {
        return Err(Error::NonFinite("schatten_norm input"));
    }
    if p == SchattenP::Two {
        return Ok(m.frobenius_norm());
    }
    let scale = m.max_abs();
    let sv = if m.hermiticity_defect() <= T::noise_floor(scale) {
        hermitian_singular_values(m)
    } else {
        singular_values(m)
    };
    Ok(norm_from_singular_values(&sv, p))
}

/// Trace norm `||m||_1`.
pub fn trace_norm<T: Real>(m: &CMatrix<T>) -> Result<T> {
    schatten_norm(m, SchattenP::One)
}

/// Operator norm `||m||_inf`.
pub fn operator_norm<T: Real>(m: &CMatrix<T>) -> Result<T> {
    schatten_norm(m, SchattenP::Inf)
}
