//! Scenario files: JSON schema, parsing and validation.

use std::path::Path;

use ctmc_core::baselines::BaselineConfig;
use ctmc_core::channels::{OdeOptions, WeightedHamiltonian};
use ctmc_core::compiler::{lambda_for_target_error, renormalize_decomposition, ErrorModel, ZeroNormPolicy};
use ctmc_core::markov::{BalancedScheme, WeightSchedule};
use ctmc_core::quantum::{pauli_to_dense, PauliTerm, MAX_QUBITS};
use ctmc_core::{Hamiltonian, State};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const SPEC_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub spec_version: u32,
    pub name: String,
    pub qubits: usize,
    /// One Pauli sum per node.
    pub hamiltonians: Vec<Vec<PauliTerm<f64>>>,
    pub weights: WeightsSpec,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub lambda: LambdaSpec,
    /// Monte-Carlo realizations.
    #[serde(rename = "M")]
    pub realizations: usize,
    #[serde(default)]
    pub integrator: IntegratorSpec,
    pub seed: u64,
    #[serde(default)]
    pub baselines: Vec<BaselineConfig>,
    /// One of `0 1 + -` per qubit, or `mixed`.
    #[serde(default = "default_initial_state")]
    pub initial_state: String,
    #[serde(default)]
    pub cost: CostSpec,
    /// Pure-state samples for the channel-distance lower bound; 0 skips it.
    #[serde(default = "default_distance_samples")]
    pub distance_samples: usize,
    #[serde(default)]
    pub outputs: OutputSpec,
}

fn default_initial_state() -> String {
    "+".into()
}

fn default_distance_samples() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightsSpec {
    Constant { values: Vec<f64> },
    /// `w_i = ||H_i|| / Σ_j ||H_j||` with every term rescaled to norm `Σ_j ||H_j||`.
    Renormalized,
    Linear { start: Vec<f64>, end: Vec<f64> },
    ClampedAdiabatic { delta: f64 },
    Tabulated { times: Vec<f64>, values: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum LambdaSpec {
    Explicit(f64),
    FromTheorem { epsilon0: f64, model: ErrorModel },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSpec {
    pub ode_tol: f64,
    pub checkpoints: usize,
    pub max_doublings: usize,
    /// Fixed midpoint steps for a time-dependent target; converged if absent.
    pub exact_steps: Option<usize>,
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        let o = OdeOptions::default();
        Self { ode_tol: o.tol, checkpoints: o.checkpoints, max_doublings: o.max_doublings, exact_steps: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostSpec {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for CostSpec {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 1.0 }
    }
}

/// File names relative to the `--out` directory; derived from `name` if absent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub csv: Option<String>,
    pub summary: Option<String>,
    pub trajectory: Option<String>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let s: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            HarnessError::config(if path == "." { "<root>".to_string() } else { path }, e.into_inner())
        })?;
        if s.spec_version != SPEC_VERSION {
            return Err(HarnessError::config("spec_version", format!("unsupported version {}, expected {SPEC_VERSION}", s.spec_version)));
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    /// Canonical JSON of the effective configuration (after overrides).
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("scenario serializes")
    }

    pub fn csv_name(&self) -> String {
        self.outputs.csv.clone().unwrap_or_else(|| format!("{}.csv", self.name))
    }

    pub fn summary_name(&self) -> String {
        self.outputs.summary.clone().unwrap_or_else(|| format!("{}.txt", self.name))
    }

    pub fn trajectory_name(&self) -> String {
        self.outputs.trajectory.clone().unwrap_or_else(|| format!("{}_trajectory.csv", self.name))
    }

    pub fn ode_options(&self) -> OdeOptions {
        OdeOptions { tol: self.integrator.ode_tol, checkpoints: self.integrator.checkpoints, max_doublings: self.integrator.max_doublings }
    }

    /// Validate everything and build the numerical objects.
    pub fn prepare(&self) -> Result<Prepared> {
        if self.name.trim().is_empty() {
            return Err(HarnessError::config("name", "must not be empty"));
        }
        if self.qubits == 0 || self.qubits > MAX_QUBITS {
            return Err(HarnessError::config("qubits", format!("must lie in 1..={MAX_QUBITS}")));
        }
        if self.hamiltonians.is_empty() {
            return Err(HarnessError::config("hamiltonians", "at least one Hamiltonian is required"));
        }
        let mut terms = self
            .hamiltonians
            .iter()
            .enumerate()
            .map(|(i, h)| pauli_to_dense(h, self.qubits).map_err(HarnessError::at(format!("hamiltonians[{i}]"))))
            .collect::<Result<Vec<Hamiltonian>>>()?;
        let q = terms.len();
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(HarnessError::config("T", "must be positive and finite"));
        }

        let schedule = match &self.weights {
            WeightsSpec::Constant { values } => {
                check_len("weights.values", values.len(), q)?;
                WeightSchedule::constant(values.clone()).map_err(HarnessError::at("weights.values"))?
            }
            WeightsSpec::Renormalized => {
                let r = renormalize_decomposition(&terms, ZeroNormPolicy::Reject).map_err(HarnessError::at("hamiltonians"))?;
                terms = r.terms;
                WeightSchedule::constant(r.weights).map_err(HarnessError::at("weights"))?
            }
            WeightsSpec::Linear { start, end } => {
                check_len("weights.start", start.len(), q)?;
                check_len("weights.end", end.len(), q)?;
                WeightSchedule::linear(start.clone(), end.clone(), self.horizon).map_err(HarnessError::at("weights"))?
            }
            WeightsSpec::ClampedAdiabatic { delta } => {
                check_len("hamiltonians", q, 2)?;
                WeightSchedule::clamped_adiabatic(*delta, self.horizon).map_err(HarnessError::at("weights.delta"))?
            }
            WeightsSpec::Tabulated { times, values } => {
                for (k, row) in values.iter().enumerate() {
                    check_len(&format!("weights.values[{k}]"), row.len(), q)?;
                }
                WeightSchedule::tabulated(times.clone(), values.clone()).map_err(HarnessError::at("weights"))?
            }
        };
        schedule.validate(self.horizon).map_err(HarnessError::at("weights"))?;

        let c = terms.iter().map(|h| h.operator_norm()).fold(0.0, f64::max);
        let (lambda, epsilon1) = match self.lambda {
            LambdaSpec::Explicit(l) => {
                if !(l > 0.0 && l.is_finite()) {
                    return Err(HarnessError::config("lambda.explicit", "must be positive and finite"));
                }
                (l, None)
            }
            LambdaSpec::FromTheorem { epsilon0, model } => {
                if !(c > 0.0) {
                    return Err(HarnessError::config("hamiltonians", "all terms vanish, C = 0"));
                }
                let choice = lambda_for_target_error(c, self.horizon, epsilon0, model).map_err(HarnessError::at("lambda.from-theorem"))?;
                (choice.lambda, choice.epsilon1)
            }
        };
        let min_lambda = schedule.minimum_lambda(self.horizon);
        let scheme = BalancedScheme::new(schedule.clone(), lambda, self.horizon).map_err(|e| {
            HarnessError::config("lambda", format!("{e} (rates need lambda >= {min_lambda:.6})"))
        })?;

        if self.realizations == 0 {
            return Err(HarnessError::config("M", "must be at least 1"));
        }
        let it = &self.integrator;
        if !(it.ode_tol > 0.0) {
            return Err(HarnessError::config("integrator.ode_tol", "must be positive"));
        }
        if it.checkpoints == 0 {
            return Err(HarnessError::config("integrator.checkpoints", "must be at least 1"));
        }
        if it.exact_steps == Some(0) {
            return Err(HarnessError::config("integrator.exact_steps", "must be at least 1"));
        }
        if !(self.cost.alpha >= 0.0) || !(self.cost.beta >= 0.0) {
            return Err(HarnessError::config("cost", "alpha and beta must be nonnegative"));
        }
        for (i, b) in self.baselines.iter().enumerate() {
            if b.n == 0 {
                return Err(HarnessError::config(format!("baselines[{i}].N"), "must be at least 1"));
            }
            if !schedule.is_constant() {
                return Err(HarnessError::config(format!("baselines[{i}]"), "baselines need constant weights"));
            }
        }
        let rho0 = initial_state(&self.initial_state, self.qubits)?;
        let target = WeightedHamiltonian::new(terms.clone(), schedule).map_err(HarnessError::at("weights"))?;
        Ok(Prepared { terms, scheme, target, lambda, epsilon1, c, rho0 })
    }
}

fn check_len(path: &str, got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(HarnessError::config(path, format!("expected {expected} entries, got {got}")));
    }
    Ok(())
}

/// Product state from per-qubit labels `0 1 + -`, or the maximally mixed state.
pub fn initial_state(label: &str, qubits: usize) -> Result<State> {
    let path = "initial_state";
    if label == "mixed" {
        return State::maximally_mixed(1 << qubits).map_err(HarnessError::at(path));
    }
    let chars: Vec<char> = label.chars().collect();
    if chars.len() != qubits {
        return Err(HarnessError::config(path, format!("expected {qubits} labels, got {:?}", label)));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = vec![Complex::new(1.0, 0.0)];
    for ch in chars {
        let single = match ch {
            '0' => [1.0, 0.0],
            '1' => [0.0, 1.0],
            '+' => [s, s],
            '-' => [s, -s],
            other => return Err(HarnessError::config(path, format!("unknown label {other:?}, use 0, 1, + or -"))),
        };
        psi = psi.iter().flat_map(|a| single.iter().map(move |b| a * b)).collect();
    }
    State::pure(&psi).map_err(HarnessError::at(path))
}

/// A validated scenario ready to run.
#[derive(Debug, Clone)]
pub struct Prepared {
    /// Node Hamiltonians (rescaled if the weights were renormalized).
    pub terms: Vec<Hamiltonian>,
    pub scheme: BalancedScheme,
    pub target: WeightedHamiltonian,
    pub lambda: f64,
    /// Per-gate error of the imperfect-gate model.
    pub epsilon1: Option<f64>,
    /// `C = max_i ||H_i||_∞`.
    pub c: f64,
    pub rho0: State,
}

impl Prepared {
    pub fn is_constant(&self) -> bool {
        self.scheme.schedule().is_constant()
    }

    pub fn weights_at(&self, t: f64) -> Vec<f64> {
        self.scheme.schedule().value(t)
    }
}
