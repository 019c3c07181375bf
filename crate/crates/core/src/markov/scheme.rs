//! Balanced transition-rate schemes and general rate matrices.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::schedule::{WeightSchedule, VALIDATION_GRID};
use crate::error::{Error, Result};
use crate::tolerances::TOLERANCES;

/// Balanced chain: the rate into node `j` is `a_j(t) = ẇ_j(t) + λ w_j(t)`
/// from every other node, so `Σ_j a_j = λ` and the occupancy tracks `w(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BalancedScheme {
    schedule: WeightSchedule,
    lambda: f64,
    horizon: f64,
}

impl BalancedScheme {
    /// Validate the schedule and rate nonnegativity on `[0, horizon]`.
    pub fn new(schedule: WeightSchedule, lambda: f64, horizon: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!("total rate lambda = {lambda} must be positive")));
        }
        schedule.validate(horizon)?;
        let scheme = Self { schedule, lambda, horizon };
        for k in 0..VALIDATION_GRID {
            let t = horizon * k as f64 / (VALIDATION_GRID - 1) as f64;
            scheme.rates(t)?;
        }
        Ok(scheme)
    }

    pub fn schedule(&self) -> &WeightSchedule {
        &self.schedule
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn nodes(&self) -> usize {
        self.schedule.nodes()
    }

    /// `a(t) = ẇ(t) + λ w(t)`; any component below `-1e-10` is an error.
    pub fn rates(&self, t: f64) -> Result<Vec<f64>> {
        let w = self.schedule.value(t);
        let d = self.schedule.derivative(t);
        let a: Vec<f64> = w.iter().zip(&d).map(|(w, d)| d + self.lambda * w).collect();
        if let Some((node, &value)) = a.iter().enumerate().find(|(_, x)| **x < -TOLERANCES.rate_negativity) {
            return Err(Error::NegativeRate { node, time: t, value });
        }
        Ok(a)
    }

    /// Stationary vector `q(t) = a(t)/λ`.
    pub fn stationary(&self, t: f64) -> Result<Vec<f64>> {
        Ok(self.rates(t)?.into_iter().map(|a| a / self.lambda).collect())
    }

    /// `q̇(t) = ẇ + ẅ/λ`.
    pub fn stationary_derivative(&self, t: f64) -> Vec<f64> {
        let d = self.schedule.derivative(t);
        let dd = self.schedule.second_derivative(t);
        d.iter().zip(&dd).map(|(d, dd)| d + dd / self.lambda).collect()
    }

    /// Same scheme with a different total rate.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.schedule.clone(), lambda, self.horizon)
    }

    /// Equivalent full rate matrix `A_ij = a_j (i != j)`.
    pub fn rate_matrix(&self) -> RateMatrix {
        let scheme = self.clone();
        let q = self.nodes();
        RateMatrix::from_fn(q, move |t| {
            let w = scheme.schedule.value(t);
            let d = scheme.schedule.derivative(t);
            let a: Vec<f64> = w.iter().zip(&d).map(|(w, d)| d + scheme.lambda * w).collect();
            let total: f64 = a.iter().sum();
            let mut m = vec![0.0; q * q];
            for i in 0..q {
                for j in 0..q {
                    m[i * q + j] = if i == j { a[i] - total } else { a[j] };
                }
            }
            m
        })
    }
}

/// `balanced_rates(scheme, t) = ẇ(t) + λ w(t)`.
pub fn balanced_rates(scheme: &BalancedScheme, t: f64) -> Result<Vec<f64>> {
    scheme.rates(t)
}

type RateFn = dyn Fn(f64) -> Vec<f64> + Send + Sync;

/// Time-dependent `Q×Q` rate matrix, row-major, `A_ij` the rate `i -> j`.
#[derive(Clone)]
pub struct RateMatrix {
    nodes: usize,
    f: Arc<RateFn>,
}

impl fmt::Debug for RateMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RateMatrix").field("nodes", &self.nodes).field("A(0)", &(self.f)(0.0)).finish()
    }
}

impl RateMatrix {
    pub fn from_fn(nodes: usize, f: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self { nodes, f: Arc::new(f) }
    }

    /// Constant matrix; diagonal entries are taken as given.
    pub fn constant(nodes: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != nodes * nodes {
            return Err(Error::DimensionMismatch { expected: nodes * nodes, got: entries.len() });
        }
        Ok(Self::from_fn(nodes, move |_| entries.clone()))
    }

    /// Constant matrix from off-diagonal rates, with `A_ii = -Σ_{j≠i} A_ij`.
    pub fn from_off_diagonal(nodes: usize, mut entries: Vec<f64>) -> Result<Self> {
        if entries.len() != nodes * nodes {
            return Err(Error::DimensionMismatch { expected: nodes * nodes, got: entries.len() });
        }
        for i in 0..nodes {
            let out: f64 = (0..nodes).filter(|&j| j != i).map(|j| entries[i * nodes + j]).sum();
            entries[i * nodes + i] = -out;
        }
        Self::constant(nodes, entries)
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn at(&self, t: f64) -> Vec<f64> {
        (self.f)(t)
    }

    /// Largest total exit rate `max_i -A_ii` over a few sample times.
    pub fn max_exit_rate(&self, horizon: f64) -> f64 {
        (0..=16)
            .map(|k| {
                let a = self.at(horizon * k as f64 / 16.0);
                (0..self.nodes).map(|i| -a[i * self.nodes + i]).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// What a structurally invalid rate matrix got wrong.
#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    NegativeOffDiagonal { row: usize, col: usize, value: f64 },
    RowSum { row: usize, sum: f64 },
    NonFinite { row: usize, col: usize },
}

/// First offending entry found by [`validate_rate_matrix`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("rate matrix invalid at t = {time}: {kind}")]
pub struct RateViolation {
    pub time: f64,
    pub kind: ViolationKind,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NegativeOffDiagonal { row, col, value } => write!(f, "A[{row}][{col}] = {value} < 0"),
            Self::RowSum { row, sum } => write!(f, "row {row} sums to {sum}"),
            Self::NonFinite { row, col } => write!(f, "A[{row}][{col}] is not finite"),
        }
    }
}

/// Outcome of a successful structural check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCheck {
    /// Smallest distance, over the grid, between the null eigenvalue of `Aᵀ`
    /// and the rest of its spectrum. Infinite for a single node.
    pub null_gap: f64,
    pub non_degenerate: bool,
}

/// Check off-diagonal nonnegativity and zero row sums at every grid time,
/// and measure the null-eigenvalue gap of `Aᵀ`.
pub fn validate_rate_matrix(a: &RateMatrix, grid: &[f64]) -> std::result::Result<RateCheck, RateViolation> {
    let q = a.nodes();
    let mut null_gap = f64::INFINITY;
    for &time in grid {
        let m = a.at(time);
        for i in 0..q {
            for j in 0..q {
                let v = m[i * q + j];
                if !v.is_finite() {
                    return Err(RateViolation { time, kind: ViolationKind::NonFinite { row: i, col: j } });
                }
                if i != j && v < 0.0 {
                    return Err(RateViolation {
                        time,
                        kind: ViolationKind::NegativeOffDiagonal { row: i, col: j, value: v },
                    });
                }
            }
            let sum: f64 = m[i * q..(i + 1) * q].iter().sum();
            if sum.abs() > TOLERANCES.row_sum {
                return Err(RateViolation { time, kind: ViolationKind::RowSum { row: i, sum } });
            }
        }
        null_gap = null_gap.min(null_eigenvalue_gap(q, &m));
    }
    Ok(RateCheck { null_gap, non_degenerate: null_gap > TOLERANCES.null_gap })
}

fn null_eigenvalue_gap(q: usize, row_major: &[f64]) -> f64 {
    if q < 2 {
        return f64::INFINITY;
    }
    // Aᵀ in nalgebra's column-major layout is A's row-major buffer.
    let at = DMatrix::from_column_slice(q, q, row_major);
    let mut moduli: Vec<f64> = at.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    moduli[1]
}
