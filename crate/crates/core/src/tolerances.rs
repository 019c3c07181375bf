//! Numerical thresholds, gathered in one place so every check in the crate
//! and in the acceptance suite uses the same values.

/// Tolerance block. [`TOLERANCES`] holds the values used throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Elementwise `|A - A^dagger|` allowed for a Hermitian operator.
    pub hermitian: f64,
    /// `||U^dagger U - I||_inf` allowed for a unitary.
    pub unitary: f64,
    /// `|tr rho - 1|` allowed for a density matrix.
    pub trace: f64,
    /// Most negative eigenvalue accepted for a density matrix.
    pub psd: f64,
    /// Largest eigenvalue above which a state is treated as pure.
    pub pure_gap: f64,
    /// A weight schedule must sum to one within this.
    pub weight_sum: f64,
    /// Rates above `-rate_negativity` are clamped to zero, below are errors.
    pub rate_negativity: f64,
    /// Row-sum tolerance for a rate matrix.
    pub row_sum: f64,
    /// Minimum null-eigenvalue gap reported as non-degenerate.
    pub null_gap: f64,
    /// Absolute tolerance of the adaptive Simpson quadrature.
    pub quadrature: f64,
    /// Default step-doubling tolerance for the block ODE.
    pub ode: f64,
    /// Step-doubling tolerance for the time-ordered exponential.
    pub time_ordered: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    hermitian: 1e-12,
    unitary: 1e-10,
    trace: 1e-10,
    psd: 1e-10,
    pure_gap: 1e-8,
    weight_sum: 1e-12,
    rate_negativity: 1e-10,
    row_sum: 1e-10,
    null_gap: 1e-8,
    quadrature: 1e-10,
    ode: 1e-9,
    time_ordered: 1e-8,
};

impl Default for Tolerances {
    fn default() -> Self {
        TOLERANCES
    }
}
