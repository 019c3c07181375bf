//! The target channel `E_T ρ = U ρ U†`, `U = 𝒯 exp(-i ∫ H(t) dt)` with
//! `H(t) = Σ_i w_i(t) H_i`.

use super::Channel;
use crate::error::{Error, Result};
use crate::markov::WeightSchedule;
use crate::quantum::evolution::{default_time_ordered_tol, time_ordered_converged};
use crate::quantum::operators::same_dim;
use crate::quantum::{time_ordered_unitary, HermitianOperator};
use crate::{Hamiltonian, Matrix, State, Unitary};

const INITIAL_STEPS: usize = 64;
const MAX_DOUBLINGS: usize = 20;

/// `H(t) = Σ_i w_i(t) H_i`.
#[derive(Debug, Clone)]
pub struct WeightedHamiltonian {
    terms: Vec<Hamiltonian>,
    schedule: WeightSchedule,
}

impl WeightedHamiltonian {
    pub fn new(terms: Vec<Hamiltonian>, schedule: WeightSchedule) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::Config("no Hamiltonian terms".into()))?;
        for h in &terms {
            same_dim(first.dim(), h.dim())?;
        }
        if schedule.nodes() != terms.len() {
            return Err(Error::Config(format!(
                "schedule has {} nodes but there are {} Hamiltonians",
                schedule.nodes(),
                terms.len()
            )));
        }
        Ok(Self { terms, schedule })
    }

    pub fn terms(&self) -> &[Hamiltonian] {
        &self.terms
    }

    pub fn schedule(&self) -> &WeightSchedule {
        &self.schedule
    }

    pub fn dim(&self) -> usize {
        self.terms[0].dim()
    }

    pub fn at(&self, t: f64) -> Result<Hamiltonian> {
        HermitianOperator::weighted_sum(&self.schedule.value(t), &self.terms)
    }

    /// Evolution over `[t0, t1]`: a single exponential for constant weights,
    /// otherwise midpoint products doubled until they move by < 1e-8.
    pub fn evolution(&self, t0: f64, t1: f64) -> Result<Unitary> {
        if self.schedule.is_constant() {
            return Ok(self.at(t0)?.exp(t1 - t0));
        }
        if t1 == t0 {
            return Ok(Unitary::identity(self.dim()));
        }
        let conv = time_ordered_converged(|t| self.at(t), t0, t1, INITIAL_STEPS, default_time_ordered_tol(), MAX_DOUBLINGS)?;
        Ok(conv.unitary)
    }

    /// Unitaries `U(t_k)` from 0 to each of the increasing `times`.
    pub fn evolution_checkpoints(&self, times: &[f64]) -> Result<Vec<Unitary>> {
        let mut out = Vec::with_capacity(times.len());
        let mut acc = Unitary::identity(self.dim());
        let mut prev = 0.0;
        for &t in times {
            acc = acc.followed_by(&self.evolution(prev, t)?);
            out.push(acc.clone());
            prev = t;
        }
        Ok(out)
    }
}

/// `E_T ρ0` with a fixed number of midpoint steps.
pub fn exact_channel(target: &WeightedHamiltonian, horizon: f64, rho0: &State, steps: usize) -> Result<State> {
    same_dim(target.dim(), rho0.dim())?;
    let u = time_ordered_unitary(|t| target.at(t), 0.0, horizon, steps)?;
    Ok(rho0.evolve(&u))
}

/// Conjugation by a fixed unitary.
#[derive(Debug, Clone)]
pub struct UnitaryChannel {
    pub unitary: Unitary,
}

impl UnitaryChannel {
    pub fn new(unitary: Unitary) -> Self {
        Self { unitary }
    }

    /// `E_T` for the whole horizon.
    pub fn target(target: &WeightedHamiltonian, horizon: f64) -> Result<Self> {
        Ok(Self::new(target.evolution(0.0, horizon)?))
    }
}

impl Channel for UnitaryChannel {
    fn dim(&self) -> usize {
        self.unitary.dim()
    }

    fn apply(&self, rho: &Matrix) -> Result<Matrix> {
        same_dim(self.dim(), rho.dim())?;
        Ok(rho.conjugate_by(self.unitary.matrix()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{pauli_to_dense, PauliTerm};
    use num_complex::Complex;
    use std::f64::consts::PI;

    fn pauli(word: &str) -> Hamiltonian {
        pauli_to_dense(&[PauliTerm::new(1.0, word)], word.len()).unwrap()
    }

    fn plus() -> State {
        State::pure(&[Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn zero_hamiltonian_leaves_state() {
        let target = WeightedHamiltonian::new(vec![Hamiltonian::zero(2).unwrap()], WeightSchedule::uniform(1).unwrap()).unwrap();
        let out = exact_channel(&target, 3.0, &plus(), 8).unwrap();
        assert!(out.matrix().max_abs_diff(plus().matrix()) < 1e-15);
    }

    #[test]
    fn z_rotation_by_pi_maps_plus_to_minus() {
        let target = WeightedHamiltonian::new(vec![pauli("Z")], WeightSchedule::uniform(1).unwrap()).unwrap();
        let out = exact_channel(&target, PI / 2.0, &plus(), 1).unwrap();
        // e^{-iZ π/2} = -iZ, a π rotation about z: |+> -> |->
        let minus = State::pure(&[Complex::new(1.0, 0.0), Complex::new(-1.0, 0.0)]).unwrap();
        assert!(out.matrix().max_abs_diff(minus.matrix()) < 1e-14);
        // T = π is a 2π rotation: back to |+>
        let full = exact_channel(&target, PI, &plus(), 1).unwrap();
        assert!(full.matrix().max_abs_diff(plus().matrix()) < 1e-14);
    }

    #[test]
    fn time_dependent_step_doubling_converges() {
        let sched = WeightSchedule::linear(vec![1.0, 0.0], vec![0.0, 1.0], 1.0).unwrap();
        let target = WeightedHamiltonian::new(vec![pauli("X"), pauli("Z")], sched).unwrap();
        let a = exact_channel(&target, 1.0, &plus(), 4096).unwrap();
        let b = exact_channel(&target, 1.0, &plus(), 8192).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-8);
        let u = target.evolution(0.0, 1.0).unwrap();
        assert!(plus().evolve(&u).matrix().max_abs_diff(b.matrix()) < 1e-8);
    }

    #[test]
    fn checkpoints_compose() {
        let sched = WeightSchedule::linear(vec![0.8, 0.2], vec![0.3, 0.7], 1.0).unwrap();
        let target = WeightedHamiltonian::new(vec![pauli("X"), pauli("Z")], sched).unwrap();
        let us = target.evolution_checkpoints(&[0.25, 0.5, 1.0]).unwrap();
        let whole = target.evolution(0.0, 1.0).unwrap();
        assert!(us[2].matrix().max_abs_diff(whole.matrix()) < 1e-8);
    }

    #[test]
    fn schedule_mismatch_rejected() {
        assert!(WeightedHamiltonian::new(vec![pauli("X")], WeightSchedule::uniform(2).unwrap()).is_err());
    }
}
