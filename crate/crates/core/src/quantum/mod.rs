//! Dense complex linear algebra on small quantum registers.

pub mod eigen;
pub mod evolution;
pub mod matrix;
pub mod metrics;
pub mod norms;
pub mod operators;
pub mod pauli;

pub use eigen::{eigh, HermitianEigen};
pub use evolution::{matexp_hermitian, time_ordered_converged, time_ordered_unitary, ConvergedUnitary};
pub use matrix::CMatrix;
pub use metrics::{state_metrics, StateMetrics};
pub use norms::{operator_norm, schatten_norm, singular_values, trace_norm, SchattenP};
pub use operators::{DensityMatrix, HermitianOperator, Spectral, UnitaryOperator, MAX_DIM, MAX_QUBITS};
pub use pauli::{pauli_to_dense, single_qubit_pauli, PauliTerm};
