//! Random compilation of weighted Hamiltonian sums driven by a
//! continuous-time Markov chain.
//!
//! A chain over `Q` nodes, one per term `H_i`, is sampled with transition
//! rates `A_ij = ẇ_j + λ w_j`; each visit to node `k` for a dwell `τ` becomes
//! the gate `e^{-i H_k τ}`. The crate also carries the exact oracles used to
//! check that construction: the time-ordered target evolution, the block
//! master equation whose solution is the average compiled channel, Monte-Carlo
//! averaging, analytic error bounds and qDRIFT / first-order Trotter
//! baselines.

pub mod baselines;
pub mod bounds;
pub mod channels;
pub mod compiler;
pub mod error;
pub mod markov;
pub mod quantum;
pub mod rng;
pub mod scalar;
pub mod tolerances;

pub use error::{Error, Result};
pub use scalar::Real;
pub use tolerances::{Tolerances, TOLERANCES};

/// Double-precision complex matrix.
pub type Matrix = quantum::CMatrix<f64>;
/// Double-precision Hermitian generator.
pub type Hamiltonian = quantum::HermitianOperator<f64>;
/// Double-precision density matrix.
pub type State = quantum::DensityMatrix<f64>;
/// Double-precision unitary.
pub type Unitary = quantum::UnitaryOperator<f64>;
/// Double-precision spectral cache.
pub type SpectralF64 = quantum::Spectral<f64>;

/// Single-precision counterparts.
pub type Matrix32 = quantum::CMatrix<f32>;
pub type Hamiltonian32 = quantum::HermitianOperator<f32>;
pub type State32 = quantum::DensityMatrix<f32>;
pub type Unitary32 = quantum::UnitaryOperator<f32>;
