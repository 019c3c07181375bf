//! Validated operator newtypes: Hermitian generators, density matrices and
//! unitaries.

use num_complex::Complex;

use super::eigen::{eigh, HermitianEigen};
use super::matrix::{vector_norm, CMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tolerances::TOLERANCES;

/// Largest supported register: 10 qubits, dimension 1024.
pub const MAX_QUBITS: usize = 10;
pub const MAX_DIM: usize = 1 << MAX_QUBITS;

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!("dimension {dim} is not a power of two")));
    }
    if dim > MAX_DIM {
        return Err(Error::TooManyQubits { qubits: dim.trailing_zeros() as usize, max: MAX_QUBITS });
    }
    Ok(())
}

fn check_hermitian<T: Real>(m: &CMatrix<T>) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::NonFinite("Hermitian operator"));
    }
    let defect = m.hermiticity_defect();
    if defect > T::tol(TOLERANCES.hermitian, m.max_abs()) {
        return Err(Error::NotHermitian(defect.to_f64_lossy()));
    }
    Ok(())
}

/// Dense Hermitian operator on `n <= 10` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator<T> {
    matrix: CMatrix<T>,
}

impl<T: Real> HermitianOperator<T> {
    /// Validate and wrap; the stored matrix is exactly symmetrized.
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        check_dim(matrix.dim())?;
        check_hermitian(&matrix)?;
        Ok(Self { matrix: matrix.hermitian_part() })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(CMatrix::zeros(dim))
    }

    pub fn from_real_diagonal(diag: &[T]) -> Result<Self> {
        Self::new(CMatrix::from_real_diagonal(diag))
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn eigen(&self) -> HermitianEigen<T> {
        eigh(&self.matrix)
    }

    pub fn spectral(&self) -> Spectral<T> {
        Spectral { eigen: self.eigen() }
    }

    /// `||H||_inf`, the largest absolute eigenvalue.
    pub fn operator_norm(&self) -> T {
        let e = self.eigen();
        e.max_value().abs().max(e.min_value().abs())
    }

    /// `e^{-iHt}`.
    pub fn exp(&self, t: T) -> UnitaryOperator<T> {
        self.spectral().evolution(t)
    }

    pub fn scale(&self, s: T) -> Self {
        Self { matrix: self.matrix.scale(s) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self { matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self { matrix: &self.matrix - &other.matrix })
    }

    /// `sum_i weights[i] * terms[i]`.
    pub fn weighted_sum(weights: &[T], terms: &[Self]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::Config("empty Hamiltonian list".into()))?;
        if weights.len() != terms.len() {
            return Err(Error::DimensionMismatch { expected: terms.len(), got: weights.len() });
        }
        let mut acc = CMatrix::zeros(first.dim());
        for (w, h) in weights.iter().zip(terms) {
            same_dim(first.dim(), h.dim())?;
            acc.axpy_real(*w, &h.matrix);
        }
        Ok(Self { matrix: acc })
    }

    pub fn cast<U: Real>(&self) -> HermitianOperator<U> {
        HermitianOperator { matrix: self.matrix.cast() }
    }
}

pub(crate) fn same_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Cached spectral decomposition of a Hermitian generator; `evolution(t)`
/// costs two small matrix products instead of a fresh eigen-solve.
#[derive(Debug, Clone)]
pub struct Spectral<T> {
    eigen: HermitianEigen<T>,
}

impl<T: Real> Spectral<T> {
    pub fn dim(&self) -> usize {
        self.eigen.values.len()
    }

    pub fn eigen(&self) -> &HermitianEigen<T> {
        &self.eigen
    }

    pub fn operator_norm(&self) -> T {
        self.eigen.max_value().abs().max(self.eigen.min_value().abs())
    }

    /// `e^{-iHt}`.
    pub fn evolution(&self, t: T) -> UnitaryOperator<T> {
        let m = self.eigen.map_spectrum(|l| {
            let phase = -l * t;
            Complex::new(phase.cos(), phase.sin())
        });
        UnitaryOperator { matrix: m }
    }
}

/// Density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    matrix: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        check_dim(matrix.dim())?;
        check_hermitian(&matrix)?;
        let matrix = matrix.hermitian_part();
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > T::tol(TOLERANCES.trace, T::one()) {
            return Err(Error::InvalidState(format!("trace {} != 1", tr.re)));
        }
        let min_eig = eigh(&matrix).min_value();
        if min_eig < -T::tol(TOLERANCES.psd, T::one()) {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig}")));
        }
        Ok(Self { matrix })
    }

    /// `|psi><psi|` for a normalized copy of `psi`.
    pub fn pure(psi: &[Complex<T>]) -> Result<Self> {
        check_dim(psi.len())?;
        let nrm = vector_norm(psi);
        if !(nrm > T::zero()) || !nrm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let v: Vec<_> = psi.iter().map(|&z| z / nrm).collect();
        Ok(Self { matrix: CMatrix::outer(&v) })
    }

    /// Computational basis state `|index>`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidState(format!("basis index {index} out of range for dim {dim}")));
        }
        let mut v = vec![Complex::new(T::zero(), T::zero()); dim];
        v[index] = Complex::new(T::one(), T::zero());
        Self::pure(&v)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { matrix: CMatrix::identity(dim).scale(T::one() / T::lit(dim as f64)) })
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `U rho U^dagger`; exact unitaries keep the state valid, so no recheck.
    pub fn evolve(&self, u: &UnitaryOperator<T>) -> Self {
        Self { matrix: self.matrix.conjugate_by(u.matrix()) }
    }

    /// Top eigenvector if the state is pure to within the configured gap.
    pub fn pure_vector(&self) -> Option<Vec<Complex<T>>> {
        let e = eigh(&self.matrix);
        let top = e.max_value();
        if top > T::one() - T::tol(TOLERANCES.pure_gap, T::one()) {
            Some(e.eigenvector(self.dim() - 1))
        } else {
            None
        }
    }
}

/// Unitary operator, `U^dagger U = I` within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator<T> {
    matrix: CMatrix<T>,
}

impl<T: Real> UnitaryOperator<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let u = Self { matrix };
        let defect = u.unitarity_defect();
        if !(defect <= T::tol(TOLERANCES.unitary, T::one())) {
            return Err(Error::InvalidState(format!("not unitary: ||U^dagger U - I|| = {defect}")));
        }
        Ok(u)
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim) }
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `||U^dagger U - I||_inf`.
    pub fn unitarity_defect(&self) -> T {
        let g = &self.matrix.adjoint().matmul(&self.matrix) - &CMatrix::identity(self.dim());
        let e = eigh(&g);
        e.max_value().abs().max(e.min_value().abs())
    }

    /// `self * rhs` (apply `rhs` first).
    pub fn then_after(&self, rhs: &Self) -> Self {
        Self { matrix: self.matrix.matmul(&rhs.matrix) }
    }

    /// `next * self`: append a later step.
    pub fn followed_by(&self, next: &Self) -> Self {
        Self { matrix: next.matrix.matmul(&self.matrix) }
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }
}
