//! Continuous-time Markov chain over the Hamiltonian terms.

pub mod occupancy;
pub mod sampler;
pub mod schedule;
pub mod scheme;

pub use occupancy::{adaptive_simpson, occupancy_solution};
pub use sampler::{sample_realization, Realization, Segment};
pub use schedule::{TabulatedSchedule, WeightSchedule};
pub use scheme::{balanced_rates, validate_rate_matrix, BalancedScheme, RateCheck, RateMatrix, RateViolation, ViolationKind};
