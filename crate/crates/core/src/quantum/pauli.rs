//! Weighted Pauli strings and their dense representation.
//!
//! Qubit 0 is the leftmost letter of a word and the most significant bit of
//! the basis index, so `"XI"` is `X ⊗ I`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::matrix::CMatrix;
use super::operators::{HermitianOperator, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// One term `coefficient * P` of a Pauli sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm<T> {
    pub coefficient: T,
    pub word: String,
}

impl<T> PauliTerm<T> {
    pub fn new(coefficient: T, word: impl Into<String>) -> Self {
        Self { coefficient, word: word.into() }
    }
}

/// Bit masks describing a Pauli word: X-type flips, Z-type signs, Y count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PauliMasks {
    flip: usize,
    sign: usize,
    y_count: u32,
}

fn parse_word(word: &str, qubits: usize) -> Result<PauliMasks> {
    let len = word.chars().count();
    if len != qubits {
        return Err(Error::WordLength { word: word.to_owned(), len, qubits });
    }
    let mut masks = PauliMasks { flip: 0, sign: 0, y_count: 0 };
    for (k, ch) in word.chars().enumerate() {
        let bit = 1usize << (qubits - 1 - k);
        match ch.to_ascii_uppercase() {
            'I' => {}
            'X' => masks.flip |= bit,
            'Z' => masks.sign |= bit,
            'Y' => {
                masks.flip |= bit;
                masks.sign |= bit;
                masks.y_count += 1;
            }
            other => return Err(Error::PauliLetter(other)),
        }
    }
    Ok(masks)
}

/// `i^k`.
fn i_pow<T: Real>(k: u32) -> Complex<T> {
    let (o, z) = (T::one(), T::zero());
    match k % 4 {
        0 => Complex::new(o, z),
        1 => Complex::new(z, o),
        2 => Complex::new(-o, z),
        _ => Complex::new(z, -o),
    }
}

/// Dense `sum_k c_k P_k` on `qubits` qubits.
///
/// A Pauli string maps `|x>` to `i^{#Y} (-1)^{|x & zy|} |x ^ xy>`, so each
/// term touches exactly one entry per column.
pub fn pauli_to_dense<T: Real>(terms: &[PauliTerm<T>], qubits: usize) -> Result<HermitianOperator<T>> {
    if qubits > MAX_QUBITS {
        return Err(Error::TooManyQubits { qubits, max: MAX_QUBITS });
    }
    if qubits == 0 {
        return Err(Error::Config("a Pauli sum needs at least one qubit".into()));
    }
    let dim = 1usize << qubits;
    let mut m = CMatrix::zeros(dim);
    for term in terms {
        if !term.coefficient.is_finite() {
            return Err(Error::NonFinite("Pauli coefficient"));
        }
        let masks = parse_word(&term.word, qubits)?;
        let base = i_pow::<T>(masks.y_count) * term.coefficient;
        for col in 0..dim {
            let row = col ^ masks.flip;
            let v = if (col & masks.sign).count_ones() % 2 == 1 { -base } else { base };
            m[(row, col)] += v;
        }
    }
    HermitianOperator::new(m)
}

/// Single-qubit Pauli matrix by letter.
pub fn single_qubit_pauli<T: Real>(letter: char) -> Result<CMatrix<T>> {
    let (o, z) = (T::one(), T::zero());
    let c = |re: T, im: T| Complex::new(re, im);
    let data = match letter.to_ascii_uppercase() {
        'I' => vec![c(o, z), c(z, z), c(z, z), c(o, z)],
        'X' => vec![c(z, z), c(o, z), c(o, z), c(z, z)],
        'Y' => vec![c(z, z), c(z, -o), c(z, o), c(z, z)],
        'Z' => vec![c(o, z), c(z, z), c(z, z), c(-o, z)],
        other => return Err(Error::PauliLetter(other)),
    };
    CMatrix::from_row_major(data)
}

/// True when the term list has no nonzero terms.
pub fn is_zero_sum<T: Real>(terms: &[PauliTerm<T>]) -> bool {
    terms.iter().all(|t| t.coefficient.is_zero())
}
