//! Cyclic Jacobi eigen-decomposition of Hermitian matrices.
//!
//! Each 2×2 pivot `[[a, b], [b*, d]]` is first made real by the phase
//! `diag(1, e^{-i arg b})` and then annihilated with a real Givens rotation.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::CMatrix;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `A = V diag(values) V^dagger`, eigenvalues ascending,
/// eigenvector `k` in column `k` of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// `V diag(f(values)) V^dagger`.
    pub fn map_spectrum(&self, mut f: impl FnMut(T) -> Complex<T>) -> CMatrix<T> {
        let n = self.values.len();
        let fv: Vec<Complex<T>> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex::zero();
                for k in 0..n {
                    acc += v[(i, k)] * fv[k] * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        self.map_spectrum(|l| Complex::new(l, T::zero()))
    }

    pub fn max_value(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::zero)
    }

    pub fn min_value(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex<T>> {
        self.vectors.column(k)
    }
}

fn off_diagonal_norm<T: Real>(a: &CMatrix<T>) -> T {
    let n = a.dim();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigen-decompose the Hermitian part of `a`.
pub fn eigh<T: Real>(a: &CMatrix<T>) -> HermitianEigen<T> {
    let n = a.dim();
    let mut work = a.hermitian_part();
    let mut vecs = CMatrix::identity(n);
    let scale = work.frobenius_norm();
    let threshold = T::epsilon() * scale.max(T::min_positive_value());

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&work) <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut work, &mut vecs, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| work[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, |i, k| vecs[(i, order[k])]);
    HermitianEigen { values, vectors }
}

fn rotate<T: Real>(a: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize) {
    let b = a[(p, q)];
    let abs_b = b.norm();
    if abs_b == T::zero() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip pivots already below round-off relative to their diagonal.
    let tiny = T::epsilon() * T::lit(1e-2) * (app.abs() + aqq.abs());
    if abs_b < tiny {
        a[(p, q)] = Complex::zero();
        a[(q, p)] = Complex::zero();
        return;
    }
    let phase = b / abs_b; // e^{i phi}
    let two = T::lit(2.0);
    let tau = (aqq - app) / (two * abs_b);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let cc = Complex::new(c, T::zero());
    let sc = Complex::new(s, T::zero());
    let pconj = phase.conj();

    let n = a.dim();
    // A <- A V, with V = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q).
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = cc * akp - sc * pconj * akq;
        a[(k, q)] = sc * akp + cc * pconj * akq;
    }
    // A <- V^dagger A.
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = cc * apk - sc * phase * aqk;
        a[(q, k)] = sc * apk + cc * phase * aqk;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)].im = T::zero();
    a[(q, q)].im = T::zero();

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = cc * vkp - sc * pconj * vkq;
        v[(k, q)] = sc * vkp + cc * pconj * vkq;
    }
}
