//! The average compiled channel as a block master equation.
//!
//! With `ρ_i(t)` the (unnormalized) state conditioned on the chain sitting at
//! node `i`,
//!
//! ```text
//! ∂_t ρ_i = -i[H_i, ρ_i] + Σ_{j≠i} A_ji ρ_j - (Σ_{j≠i} A_ij) ρ_i,   ρ_i(0) = p_i(0) ρ0,
//! ```
//!
//! and the average output is `Σ_i ρ_i(T)`. Integration is classical RK4 on a
//! uniform grid, halving the step until two successive grids agree.

use num_complex::Complex;

use super::Channel;
use crate::error::{Error, Result};
use crate::markov::{BalancedScheme, RateMatrix};
use crate::quantum::operators::same_dim;
use crate::quantum::trace_norm;
use crate::tolerances::TOLERANCES;
use crate::{Hamiltonian, Matrix, State};

/// A chain the block equation can be driven by.
pub trait ChainModel: Send + Sync {
    fn nodes(&self) -> usize;
    /// `p(0)`.
    fn initial(&self) -> Vec<f64>;
    /// Row-major `A(t)`; diagonal entries are ignored.
    fn rates_at(&self, t: f64) -> Result<Vec<f64>>;
    /// Upper bound on any exit rate over `[0, horizon]`, used for step sizing.
    fn max_rate(&self, horizon: f64) -> f64;
}

impl ChainModel for BalancedScheme {
    fn nodes(&self) -> usize {
        BalancedScheme::nodes(self)
    }

    fn initial(&self) -> Vec<f64> {
        self.schedule().value(0.0)
    }

    fn rates_at(&self, t: f64) -> Result<Vec<f64>> {
        let a = self.rates(t)?;
        let q = a.len();
        let mut m = vec![0.0; q * q];
        for i in 0..q {
            m[i * q..(i + 1) * q].copy_from_slice(&a);
        }
        Ok(m)
    }

    fn max_rate(&self, _horizon: f64) -> f64 {
        self.lambda()
    }
}

/// An arbitrary rate matrix with an explicit initial distribution.
#[derive(Debug, Clone)]
pub struct GeneralChain {
    pub rates: RateMatrix,
    pub initial: Vec<f64>,
}

impl GeneralChain {
    pub fn new(rates: RateMatrix, initial: Vec<f64>) -> Result<Self> {
        if initial.len() != rates.nodes() {
            return Err(Error::DimensionMismatch { expected: rates.nodes(), got: initial.len() });
        }
        Ok(Self { rates, initial })
    }
}

impl ChainModel for GeneralChain {
    fn nodes(&self) -> usize {
        self.rates.nodes()
    }

    fn initial(&self) -> Vec<f64> {
        self.initial.clone()
    }

    fn rates_at(&self, t: f64) -> Result<Vec<f64>> {
        Ok(self.rates.at(t))
    }

    fn max_rate(&self, horizon: f64) -> f64 {
        self.rates.max_exit_rate(horizon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    /// Accept when successive grids differ by less than this in
    /// `max_t Σ_i ||Δρ_i(t)||_1`.
    pub tol: f64,
    /// Uniformly spaced output times after `t = 0`.
    pub checkpoints: usize,
    pub max_doublings: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { tol: TOLERANCES.ode, checkpoints: 100, max_doublings: 20 }
    }
}

/// All blocks at one time.
#[derive(Debug, Clone)]
pub struct BlockState {
    pub time: f64,
    pub blocks: Vec<Matrix>,
}

impl BlockState {
    /// `Σ_i ρ_i`.
    pub fn reduced(&self) -> Matrix {
        let mut out = Matrix::zeros(self.blocks[0].dim());
        for b in &self.blocks {
            out += b;
        }
        out
    }

    /// `tr ρ_i`, real parts.
    pub fn traces(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.trace().re).collect()
    }

    /// `ρ̃_i = ρ_i - w_i Σ_j ρ_j`.
    pub fn bias_blocks(&self, weights: &[f64]) -> Result<Vec<Matrix>> {
        if weights.len() != self.blocks.len() {
            return Err(Error::DimensionMismatch { expected: self.blocks.len(), got: weights.len() });
        }
        let total = self.reduced();
        Ok(self
            .blocks
            .iter()
            .zip(weights)
            .map(|(b, &w)| {
                let mut out = b.clone();
                out.axpy_real(-w, &total);
                out
            })
            .collect())
    }
}

/// Block solution at `t = kT/K`, `k = 0..=K`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<BlockState>,
    /// RK4 steps over the whole horizon on the accepted grid.
    pub steps: usize,
    /// Difference to the previous (coarser) grid.
    pub last_change: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &BlockState {
        self.states.last().expect("trajectory has at least the initial state")
    }
}

fn rhs(hams: &[Hamiltonian], rates: &[f64], blocks: &[Matrix]) -> Vec<Matrix> {
    let q = blocks.len();
    let minus_i = Complex::new(0.0, -1.0);
    (0..q)
        .map(|i| {
            let h = hams[i].matrix();
            let mut out = h.commutator(&blocks[i]).scale_complex(minus_i);
            let mut exit = 0.0;
            for j in 0..q {
                if j != i {
                    out.axpy_real(rates[j * q + i], &blocks[j]);
                    exit += rates[i * q + j];
                }
            }
            out.axpy_real(-exit, &blocks[i]);
            out
        })
        .collect()
}

fn shifted(blocks: &[Matrix], k: &[Matrix], h: f64) -> Vec<Matrix> {
    blocks
        .iter()
        .zip(k)
        .map(|(b, k)| {
            let mut out = b.clone();
            out.axpy_real(h, k);
            out
        })
        .collect()
}

/// RK4 with `per_checkpoint` steps between outputs.
fn integrate(
    model: &dyn ChainModel,
    hams: &[Hamiltonian],
    horizon: f64,
    init: &[Matrix],
    checkpoints: usize,
    per_checkpoint: usize,
) -> Result<Vec<BlockState>> {
    let n = checkpoints * per_checkpoint;
    let h = horizon / n as f64;
    let mut blocks = init.to_vec();
    let mut out = Vec::with_capacity(checkpoints + 1);
    out.push(BlockState { time: 0.0, blocks: blocks.clone() });
    for step in 0..n {
        let t = step as f64 * h;
        let a0 = model.rates_at(t)?;
        let am = model.rates_at(t + 0.5 * h)?;
        let a1 = model.rates_at(t + h)?;
        let k1 = rhs(hams, &a0, &blocks);
        let k2 = rhs(hams, &am, &shifted(&blocks, &k1, 0.5 * h));
        let k3 = rhs(hams, &am, &shifted(&blocks, &k2, 0.5 * h));
        let k4 = rhs(hams, &a1, &shifted(&blocks, &k3, h));
        for (i, b) in blocks.iter_mut().enumerate() {
            b.axpy_real(h / 6.0, &k1[i]);
            b.axpy_real(h / 3.0, &k2[i]);
            b.axpy_real(h / 3.0, &k3[i]);
            b.axpy_real(h / 6.0, &k4[i]);
        }
        if (step + 1) % per_checkpoint == 0 {
            let k = (step + 1) / per_checkpoint;
            out.push(BlockState { time: horizon * k as f64 / checkpoints as f64, blocks: blocks.clone() });
        }
    }
    if blocks.iter().any(|b| !b.is_finite()) {
        return Err(Error::NonFinite("block ODE state"));
    }
    Ok(out)
}

fn trajectory_change(a: &[BlockState], b: &[BlockState]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (sa, sb) in a.iter().zip(b) {
        let mut sum = 0.0;
        for (x, y) in sa.blocks.iter().zip(&sb.blocks) {
            sum += trace_norm(&(x - y))?;
        }
        worst = worst.max(sum);
    }
    Ok(worst)
}

/// Solve the block equation from `ρ_i(0) = p_i(0) ρ0`.
///
/// `rho0` may be any matrix; the map is linear.
pub fn averaged_channel_ode(
    model: &dyn ChainModel,
    hams: &[Hamiltonian],
    horizon: f64,
    rho0: &Matrix,
    opts: &OdeOptions,
) -> Result<Trajectory> {
    let q = model.nodes();
    if hams.len() != q {
        return Err(Error::DimensionMismatch { expected: q, got: hams.len() });
    }
    for h in hams {
        same_dim(rho0.dim(), h.dim())?;
    }
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(Error::Config(format!("horizon {horizon} must be finite and nonnegative")));
    }
    if opts.checkpoints == 0 {
        return Err(Error::Config("at least one checkpoint is required".into()));
    }
    let p0 = model.initial();
    if p0.len() != q {
        return Err(Error::DimensionMismatch { expected: q, got: p0.len() });
    }
    let init: Vec<Matrix> = p0.iter().map(|&p| rho0.scale(p)).collect();
    if horizon == 0.0 {
        let states = vec![BlockState { time: 0.0, blocks: init }];
        return Ok(Trajectory { times: vec![0.0], states, steps: 0, last_change: 0.0 });
    }

    let h_norm = hams.iter().map(|h| h.operator_norm()).fold(0.0, f64::max);
    let scale = model.max_rate(horizon).max(h_norm);
    let interval = horizon / opts.checkpoints as f64;
    let mut per = if scale > 0.0 { (interval * scale / 0.1).ceil().max(1.0) as usize } else { 1 };

    let mut prev = integrate(model, hams, horizon, &init, opts.checkpoints, per)?;
    let mut last_change = f64::INFINITY;
    for _ in 0..opts.max_doublings {
        per *= 2;
        let next = integrate(model, hams, horizon, &init, opts.checkpoints, per)?;
        last_change = trajectory_change(&prev, &next)?;
        prev = next;
        if last_change < opts.tol {
            let times = prev.iter().map(|s| s.time).collect();
            return Ok(Trajectory { times, states: prev, steps: per * opts.checkpoints, last_change });
        }
    }
    Err(Error::NonConvergence { what: "block ODE", last_change, iterations: opts.max_doublings })
}

/// Reduced output state `Σ_i ρ_i(T)`.
pub fn averaged_state(model: &dyn ChainModel, hams: &[Hamiltonian], horizon: f64, rho0: &State, opts: &OdeOptions) -> Result<State> {
    let traj = averaged_channel_ode(model, hams, horizon, rho0.matrix(), opts)?;
    State::new(traj.final_state().reduced())
}

/// The average compiled channel as a [`Channel`].
#[derive(Debug, Clone)]
pub struct AveragedChannel<M> {
    pub model: M,
    pub hams: Vec<Hamiltonian>,
    pub horizon: f64,
    pub opts: OdeOptions,
}

impl<M: ChainModel> Channel for AveragedChannel<M> {
    fn dim(&self) -> usize {
        self.hams[0].dim()
    }

    fn apply(&self, rho: &Matrix) -> Result<Matrix> {
        let traj = averaged_channel_ode(&self.model, &self.hams, self.horizon, rho, &self.opts)?;
        Ok(traj.final_state().reduced())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::WeightSchedule;
    use crate::quantum::{pauli_to_dense, PauliTerm};

    fn pauli(word: &str) -> Hamiltonian {
        pauli_to_dense(&[PauliTerm::new(1.0, word)], word.len()).unwrap()
    }

    fn plus() -> State {
        State::pure(&[Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn identical_terms_reduce_to_unitary() {
        let s = BalancedScheme::new(WeightSchedule::constant(vec![0.3, 0.7]).unwrap(), 10.0, 1.0).unwrap();
        let hams = vec![pauli("X"), pauli("X")];
        let out = averaged_state(&s, &hams, 1.0, &plus(), &OdeOptions::default()).unwrap();
        let zero = State::basis(2, 0).unwrap();
        let out0 = averaged_state(&s, &hams, 1.0, &zero, &OdeOptions::default()).unwrap();
        assert!(out.matrix().max_abs_diff(plus().matrix()) < 1e-9);
        let exact = zero.evolve(&hams[0].exp(1.0));
        assert!(out0.matrix().max_abs_diff(exact.matrix()) < 1e-9);
    }

    #[test]
    fn marginals_follow_weights_when_started_stationary() {
        let s = BalancedScheme::new(WeightSchedule::clamped_adiabatic(0.1, 1.0).unwrap(), 20.0, 1.0).unwrap();
        let hams = vec![pauli("X"), pauli("Z")];
        let traj = averaged_channel_ode(&s, &hams, 1.0, plus().matrix(), &OdeOptions::default()).unwrap();
        assert_eq!(traj.states.len(), 101);
        for st in &traj.states {
            let w = s.schedule().value(st.time);
            for (tr, w) in st.traces().iter().zip(&w) {
                assert!((tr - w).abs() < 1e-8, "t={} {tr} vs {w}", st.time);
            }
        }
    }

    #[test]
    fn general_chain_matches_balanced() {
        let s = BalancedScheme::new(WeightSchedule::constant(vec![0.4, 0.6]).unwrap(), 6.0, 1.0).unwrap();
        let g = GeneralChain::new(s.rate_matrix(), vec![0.4, 0.6]).unwrap();
        let hams = vec![pauli("X"), pauli("Z")];
        let a = averaged_state(&s, &hams, 1.0, &plus(), &OdeOptions::default()).unwrap();
        let b = averaged_state(&g, &hams, 1.0, &plus(), &OdeOptions::default()).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-10);
    }

    #[test]
    fn hamiltonian_count_checked() {
        let s = BalancedScheme::new(WeightSchedule::uniform(2).unwrap(), 6.0, 1.0).unwrap();
        assert!(averaged_channel_ode(&s, &[pauli("X")], 1.0, plus().matrix(), &OdeOptions::default()).is_err());
    }
}
