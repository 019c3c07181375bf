//! One end-to-end scenario run.

use rand::RngCore;

use ctmc_core::baselines::{trotter1_sequence, BaselineConfig, BaselineKind, FactorOrder, Qdrift};
use ctmc_core::bounds::{bound_balanced_qnode, bound_general_p, bound_two_node, BoundInputs};
use ctmc_core::channels::{
    averaged_channel_ode, bias_norm, channel_distance_lb, exact_channel, mc_average, mc_channel, AveragedChannel, DistanceOptions,
    McOptions, Trajectory, UnitaryChannel,
};
use ctmc_core::compiler::{CostModel, Gate};
use ctmc_core::quantum::{schatten_norm, state_metrics, SchattenP};
use ctmc_core::rng::{stream, AUX_STREAM};
use ctmc_core::{Hamiltonian, Matrix, State, Unitary};

use crate::error::Result;
use crate::scenario::{Prepared, Scenario};

/// Stream-key offsets for the independent random tasks of a run.
const DISTANCE_TASK: u64 = 1;
const BASELINE_TASK: u64 = 100;

/// A seed for an auxiliary task, derived from the master seed.
pub fn subseed(seed: u64, task: u64) -> u64 {
    stream(seed, AUX_STREAM - task).next_u64()
}

/// `measured <= bound + slack`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub slack: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.measured <= self.bound + self.slack
    }
}

/// Headline numbers of a run; `None` where a quantity does not apply.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub scenario: String,
    pub lambda: f64,
    pub horizon: f64,
    pub realizations: usize,
    pub nodes: usize,
    pub c: f64,
    pub epsilon1: Option<f64>,
    /// `||E_T ρ0 - S_T ρ0||_p` with `S_T` from the block ODE.
    pub bias_p1: f64,
    pub bias_p2: f64,
    pub bias_pinf: f64,
    pub trace_distance: f64,
    pub fidelity: f64,
    /// `||E_T ρ0 - Ŝ_T ρ0||_1` with the Monte-Carlo estimate (gate errors included).
    pub mc_error_p1: f64,
    pub mc_stderr: f64,
    /// `||Ŝ_T ρ0 - S_T ρ0||_1`.
    pub mc_vs_ode_p1: f64,
    pub distance_lb: Option<f64>,
    pub bound_two_node: Option<f64>,
    pub bound_qnode: Option<f64>,
    pub bound_general: Option<f64>,
    /// Perfect-gate bound plus `λTε₁` under the imperfect-gate model.
    pub bound_total: Option<f64>,
    pub segments_mean: f64,
    pub gates_realized_mean: f64,
    pub gates_realized_stderr: f64,
    pub gates_bound: f64,
    pub ode_steps: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRow {
    pub kind: BaselineKind,
    pub n: usize,
    pub error_p1: f64,
    pub stderr: f64,
    pub segments_mean: f64,
    pub gates_realized_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub time: f64,
    pub traces: Vec<f64>,
    pub bias_p1: f64,
    pub bias_p2: f64,
    pub bias_pinf: f64,
}

#[derive(Debug, Clone)]
pub struct Report {
    /// Effective configuration (after command-line overrides).
    pub scenario: Scenario,
    pub row: RunRow,
    pub checks: Vec<Check>,
    pub baselines: Vec<BaselineRow>,
    pub trajectory: Vec<TrajectoryRow>,
    pub exact: State,
    pub averaged: State,
    pub monte_carlo: State,
}

impl Report {
    pub fn violations(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

fn norms(m: &Matrix) -> Result<[f64; 3]> {
    Ok([schatten_norm(m, SchattenP::One)?, schatten_norm(m, SchattenP::Two)?, schatten_norm(m, SchattenP::Inf)?])
}

fn exact_unitary(s: &Scenario, p: &Prepared) -> Result<Unitary> {
    Ok(UnitaryChannel::target(&p.target, s.horizon)?.unitary)
}

fn exact_state(s: &Scenario, p: &Prepared) -> Result<State> {
    match s.integrator.exact_steps {
        Some(steps) if !p.is_constant() => Ok(exact_channel(&p.target, s.horizon, &p.rho0, steps)?),
        _ => Ok(p.rho0.evolve(&exact_unitary(s, p)?)),
    }
}

fn trajectory_rows(p: &Prepared, traj: &Trajectory) -> Result<Vec<TrajectoryRow>> {
    let us = p.target.evolution_checkpoints(&traj.times)?;
    traj.states
        .iter()
        .zip(&us)
        .map(|(st, u)| {
            let exact = p.rho0.matrix().conjugate_by(u.matrix());
            let [b1, b2, binf] = norms(&(&exact - &st.reduced()))?;
            Ok(TrajectoryRow { time: st.time, traces: st.traces(), bias_p1: b1, bias_p2: b2, bias_pinf: binf })
        })
        .collect()
}

/// Node-time dwells so that every baseline gate is `e^{-i H_node dwell}`.
fn qdrift_over_weighted_terms(terms: &[Hamiltonian], weights: &[f64]) -> Result<(Qdrift, Vec<usize>, Vec<f64>)> {
    let mut scaled = Vec::new();
    let mut nodes = Vec::new();
    let mut w_kept = Vec::new();
    for (i, (h, &w)) in terms.iter().zip(weights).enumerate() {
        let hw = h.scale(w);
        if hw.operator_norm() > 0.0 {
            scaled.push(hw);
            nodes.push(i);
            w_kept.push(w);
        }
    }
    Ok((Qdrift::new(&scaled)?, nodes, w_kept))
}

fn run_baseline(s: &Scenario, p: &Prepared, exact: &State, index: usize, cfg: &BaselineConfig, cost: &CostModel) -> Result<BaselineRow> {
    let weights = p.weights_at(0.0);
    let opts = McOptions { realizations: s.realizations, seed: subseed(s.seed, BASELINE_TASK + index as u64), epsilon1: None };
    let est = match cfg.kind {
        BaselineKind::Qdrift => {
            let (q, nodes, w) = qdrift_over_weighted_terms(&p.terms, &weights)?;
            mc_average(&p.rho0, &opts, |rng, _| {
                let mut seq = q.sequence(s.horizon, cfg.n, rng)?;
                seq.gates = seq
                    .gates
                    .into_iter()
                    .map(|g| Gate { node: nodes[g.node], dwell: g.dwell * w[g.node], unitary: g.unitary })
                    .collect();
                Ok(seq)
            })?
        }
        BaselineKind::Trotter1Det | BaselineKind::Trotter1Random => {
            let order = if cfg.kind == BaselineKind::Trotter1Det { FactorOrder::Fixed } else { FactorOrder::RandomPermutation };
            mc_average(&p.rho0, &opts, |rng, _| trotter1_sequence(&p.terms, &weights, s.horizon, cfg.n, order, rng))?
        }
    };
    Ok(BaselineRow {
        kind: cfg.kind,
        n: cfg.n,
        error_p1: bias_norm(exact, &est.output, SchattenP::One)?,
        stderr: est.stderr,
        segments_mean: est.mean_segments,
        gates_realized_mean: cost.realized_from_totals(est.mean_segments, est.mean_total_dwell),
    })
}

/// Run every oracle on a scenario and check the measured errors against the
/// analytic bounds.
pub fn run_scenario(s: &Scenario) -> Result<Report> {
    let p = s.prepare()?;
    let ode_opts = s.ode_options();
    let slack = 10.0 * ode_opts.tol;

    let exact = exact_state(s, &p)?;
    let traj = averaged_channel_ode(&p.scheme, &p.terms, s.horizon, p.rho0.matrix(), &ode_opts)?;
    let averaged = State::new(traj.final_state().reduced())?;
    let [bias_p1, bias_p2, bias_pinf] = norms(&(exact.matrix() - averaged.matrix()))?;
    let metrics = state_metrics(&exact, &averaged)?;

    let spectra: Vec<_> = p.terms.iter().map(|h| h.spectral()).collect();
    let mc = mc_channel(&p.scheme, &spectra, s.horizon, &p.rho0, &McOptions { realizations: s.realizations, seed: s.seed, epsilon1: p.epsilon1 })?;
    let mc_error_p1 = bias_norm(&exact, &mc.output, SchattenP::One)?;
    let mc_vs_ode_p1 = bias_norm(&mc.output, &averaged, SchattenP::One)?;

    let distance_lb = if s.distance_samples > 0 {
        let target = UnitaryChannel::new(exact_unitary(s, &p)?);
        let avg = AveragedChannel { model: p.scheme.clone(), hams: p.terms.clone(), horizon: s.horizon, opts: ode_opts };
        let opts = DistanceOptions::new(s.distance_samples, subseed(s.seed, DISTANCE_TASK));
        Some(channel_distance_lb(&target, &avg, &opts)?.value)
    } else {
        None
    };

    let q = p.terms.len();
    let BoundsReport { bound_two_node, bound_qnode, bound_general, bound_total, gates_bound, .. } = analytic_bounds(s, &p)?;
    let cost = cost_model(s, &p)?;
    let gates_realized_mean = cost.realized_from_totals(mc.mean_segments, mc.mean_total_dwell);
    let gates_realized_stderr = s.cost.alpha * mc.segments_stderr * cost.log_factor();

    let mut checks = Vec::new();
    let mut check = |name: &str, measured: f64, bound: Option<f64>, slack: f64| {
        if let Some(bound) = bound {
            checks.push(Check { name: name.to_string(), measured, bound, slack });
        }
    };
    check("bias_p1 <= bound_two_node", bias_p1, bound_two_node, slack);
    check("bias_p1 <= bound_qnode", bias_p1, bound_qnode, slack);
    check("bias_p1 <= bound_general", bias_p1, bound_general, slack);
    if let Some(lb) = distance_lb {
        check("distance_lb <= bound_two_node", lb, bound_two_node, slack);
        check("distance_lb <= bound_qnode", lb, bound_qnode, slack);
        check("distance_lb <= bound_general", lb, bound_general, slack);
    }
    check("mc_error_p1 - 3 stderr <= bound_total", mc_error_p1 - 3.0 * mc.stderr, bound_total, slack);
    if metrics.pure_reference {
        check("1 - fidelity <= trace_distance", 1.0 - metrics.fidelity, Some(metrics.trace_distance), 1e-12);
    }

    let baselines = s
        .baselines
        .iter()
        .enumerate()
        .map(|(i, b)| run_baseline(s, &p, &exact, i, b, &cost))
        .collect::<Result<Vec<_>>>()?;
    let trajectory = trajectory_rows(&p, &traj)?;

    let violations = checks.iter().filter(|c| !c.passed()).count();
    let row = RunRow {
        scenario: s.name.clone(),
        lambda: p.lambda,
        horizon: s.horizon,
        realizations: s.realizations,
        nodes: q,
        c: p.c,
        epsilon1: p.epsilon1,
        bias_p1,
        bias_p2,
        bias_pinf,
        trace_distance: metrics.trace_distance,
        fidelity: metrics.fidelity,
        mc_error_p1,
        mc_stderr: mc.stderr,
        mc_vs_ode_p1,
        distance_lb,
        bound_two_node,
        bound_qnode,
        bound_general,
        bound_total,
        segments_mean: mc.mean_segments,
        gates_realized_mean,
        gates_realized_stderr,
        gates_bound,
        ode_steps: traj.steps,
        violations,
    };
    Ok(Report { scenario: s.clone(), row, checks, baselines, trajectory, exact, averaged, monte_carlo: mc.output })
}

/// Analytic quantities only.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub lambda: f64,
    pub epsilon1: Option<f64>,
    pub c: f64,
    pub min_lambda: f64,
    pub bound_two_node: Option<f64>,
    pub bound_qnode: Option<f64>,
    pub bound_general: Option<f64>,
    pub bound_total: Option<f64>,
    pub gates_bound: f64,
}

pub fn scenario_bounds(s: &Scenario) -> Result<BoundsReport> {
    analytic_bounds(s, &s.prepare()?)
}

fn cost_model(s: &Scenario, p: &Prepared) -> Result<CostModel> {
    Ok(CostModel::new(s.cost.alpha, s.cost.beta, p.c.max(f64::MIN_POSITIVE), p.epsilon1)?)
}

fn analytic_bounds(s: &Scenario, p: &Prepared) -> Result<BoundsReport> {
    let bound_two_node = if p.terms.len() == 2 {
        let dh = p.terms[0].sub(&p.terms[1])?.operator_norm();
        Some(bound_two_node(p.scheme.schedule().sup_pair_product(s.horizon), dh, s.horizon, p.lambda)?)
    } else {
        None
    };
    let bound_qnode = bound_balanced_qnode(p.c, s.horizon, p.lambda).ok();
    let bound_general = if p.is_constant() {
        bound_general_p(&BoundInputs::from_terms(&p.terms, &p.weights_at(0.0), s.horizon, p.lambda, SchattenP::One)?).ok()
    } else {
        None
    };
    Ok(BoundsReport {
        lambda: p.lambda,
        epsilon1: p.epsilon1,
        c: p.c,
        min_lambda: p.scheme.schedule().minimum_lambda(s.horizon),
        bound_two_node,
        bound_qnode,
        bound_general,
        bound_total: bound_qnode.map(|b| b + p.epsilon1.map_or(0.0, |e| p.lambda * s.horizon * e)),
        gates_bound: cost_model(s, p)?.expected_bound(p.lambda, s.horizon),
    })
}
