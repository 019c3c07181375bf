//! Channels acting on density matrices: the exact target, the average
//! compiled channel (block master equation), Monte-Carlo estimates of it,
//! and distances between them.

mod block;
mod distance;
mod exact;
mod monte_carlo;

pub use block::{averaged_channel_ode, averaged_state, AveragedChannel, BlockState, ChainModel, GeneralChain, OdeOptions, Trajectory};
pub use distance::{bias_norm, channel_distance_lb, haar_state, DistanceEstimate, DistanceOptions};
pub use exact::{exact_channel, UnitaryChannel, WeightedHamiltonian};
pub use monte_carlo::{depolarize, mc_average, mc_channel, ChannelEstimate, McOptions, MC_CHUNK};

use crate::error::Result;
use crate::quantum::operators::same_dim;
use crate::Matrix;
use num_complex::Complex;

/// A linear map on `d×d` matrices.
///
/// Implementations must accept arbitrary (non-Hermitian) inputs so that the
/// map can be tabulated on the matrix units `|j><k|`.
pub trait Channel: Send + Sync {
    fn dim(&self) -> usize;
    fn apply(&self, rho: &Matrix) -> Result<Matrix>;
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityChannel {
    pub dim: usize,
}

impl Channel for IdentityChannel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, rho: &Matrix) -> Result<Matrix> {
        same_dim(self.dim, rho.dim())?;
        Ok(rho.clone())
    }
}

/// The `d²×d²` matrix of a channel on row-major vectorized inputs.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    dim: usize,
    matrix: Matrix,
}

impl TransferMatrix {
    /// Tabulate `channel` on every matrix unit `|j><k|`.
    pub fn from_channel(channel: &dyn Channel) -> Result<Self> {
        let d = channel.dim();
        let mut matrix = Matrix::zeros(d * d);
        for j in 0..d {
            for k in 0..d {
                let mut unit = Matrix::zeros(d);
                unit[(j, k)] = Complex::new(1.0, 0.0);
                let out = channel.apply(&unit)?;
                let col = j * d + k;
                for (row, z) in out.as_slice().iter().enumerate() {
                    matrix[(row, col)] = *z;
                }
            }
        }
        Ok(Self { dim: d, matrix })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

impl Channel for TransferMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, rho: &Matrix) -> Result<Matrix> {
        same_dim(self.dim, rho.dim())?;
        Matrix::from_row_major(self.matrix.matvec(rho.as_slice()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{pauli_to_dense, PauliTerm};

    #[test]
    fn transfer_matrix_reproduces_channel() {
        let h = pauli_to_dense(&[PauliTerm::new(0.7, "XY"), PauliTerm::new(-0.3, "ZI")], 2).unwrap();
        let ch = UnitaryChannel::new(h.exp(0.9));
        let tm = TransferMatrix::from_channel(&ch).unwrap();
        let rho = crate::State::basis(4, 2).unwrap();
        let a = ch.apply(rho.matrix()).unwrap();
        let b = tm.apply(rho.matrix()).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-14);
        let id = TransferMatrix::from_channel(&IdentityChannel { dim: 2 }).unwrap();
        assert!(id.matrix().max_abs_diff(&Matrix::identity(4)) < 1e-15);
    }
}
