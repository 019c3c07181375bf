use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Pauli word {word:?} has length {len}, expected {qubits}")]
    WordLength { word: String, len: usize, qubits: usize },

    #[error("invalid Pauli letter {0:?} (expected one of I, X, Y, Z)")]
    PauliLetter(char),

    #[error("{qubits} qubits exceeds the dense-matrix cap of {max}")]
    TooManyQubits { qubits: usize, max: usize },

    #[error("matrix is not Hermitian (max |A - A^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid weight schedule: {0}")]
    InvalidSchedule(String),

    #[error("negative transition rate a[{node}] = {value:e} at t = {time}: lambda too small for this schedule")]
    NegativeRate { node: usize, time: f64, value: f64 },

    #[error("bound is vacuous: denominator {denominator:e} <= 0 ({what})")]
    Pole { what: &'static str, denominator: f64 },

    #[error("term {0} has zero operator norm")]
    ZeroNormTerm(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{what} did not converge: last change {last_change:e} after {iterations} refinements")]
    NonConvergence { what: &'static str, last_change: f64, iterations: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
