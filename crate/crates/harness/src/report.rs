//! CSV and plain-text report emission.
//!
//! Every float is written as `{:.12e}` and columns are fixed, so identical
//! inputs give byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};
use crate::run::{BaselineRow, Report, RunRow, TrajectoryRow};
use crate::scenario::Scenario;

/// `git describe` of the source tree at build time.
pub const GIT_DESCRIBE: &str = env!("CTMC_GIT_DESCRIBE");

pub const RUN_COLUMNS: &[&str] = &[
    "scenario",
    "lambda",
    "T",
    "M",
    "Q",
    "C",
    "epsilon1",
    "bias_p1",
    "bias_p2",
    "bias_pinf",
    "trace_distance",
    "fidelity",
    "mc_error_p1",
    "mc_stderr",
    "mc_vs_ode_p1",
    "distance_lb",
    "bound_two_node",
    "bound_qnode",
    "bound_general",
    "bound_total",
    "segments_mean",
    "gates_realized_mean",
    "gates_realized_stderr",
    "gates_bound",
    "ode_steps",
    "violations",
];

pub const BASELINE_COLUMNS: &[&str] = &["scenario", "row", "kind", "N", "error_p1", "stderr", "segments_mean", "gates_realized_mean"];

fn num(x: f64) -> String {
    format!("{x:.12e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), num)
}

/// SHA-256 of the canonical JSON of the effective configuration.
pub fn config_hash(s: &Scenario) -> String {
    format!("{:x}", Sha256::digest(s.canonical_json().as_bytes()))
}

/// Comment lines written above the column header.
#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub scenario: String,
    pub seed: u64,
    pub config_hash: String,
    pub extra: Vec<(String, String)>,
}

impl Header {
    pub fn for_scenario(s: &Scenario) -> Self {
        Self { scenario: s.name.clone(), seed: s.seed, config_hash: config_hash(s), extra: Vec::new() }
    }

    fn write(&self, out: &mut String) {
        let _ = writeln!(out, "# scenario: {}", self.scenario);
        let _ = writeln!(out, "# seed: {}", self.seed);
        let _ = writeln!(out, "# git: {GIT_DESCRIBE}");
        let _ = writeln!(out, "# config_sha256: {}", self.config_hash);
        for (k, v) in &self.extra {
            let _ = writeln!(out, "# {k}: {v}");
        }
    }
}

fn run_fields(r: &RunRow) -> Vec<String> {
    vec![
        r.scenario.clone(),
        num(r.lambda),
        num(r.horizon),
        r.realizations.to_string(),
        r.nodes.to_string(),
        num(r.c),
        opt(r.epsilon1),
        num(r.bias_p1),
        num(r.bias_p2),
        num(r.bias_pinf),
        num(r.trace_distance),
        num(r.fidelity),
        num(r.mc_error_p1),
        num(r.mc_stderr),
        num(r.mc_vs_ode_p1),
        opt(r.distance_lb),
        opt(r.bound_two_node),
        opt(r.bound_qnode),
        opt(r.bound_general),
        opt(r.bound_total),
        num(r.segments_mean),
        num(r.gates_realized_mean),
        num(r.gates_realized_stderr),
        num(r.gates_bound),
        r.ode_steps.to_string(),
        r.violations.to_string(),
    ]
}

fn baseline_fields(scenario: &str, row: usize, b: &BaselineRow) -> Vec<String> {
    let kind = serde_json::to_value(b.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    vec![
        scenario.to_string(),
        row.to_string(),
        kind,
        b.n.to_string(),
        num(b.error_p1),
        num(b.stderr),
        num(b.segments_mean),
        num(b.gates_realized_mean),
    ]
}

/// Main report table, one row per run.
pub fn emit_csv(rows: &[RunRow], header: &Header) -> Result<String> {
    if rows.is_empty() {
        return Err(HarnessError::EmptyReport);
    }
    let mut out = String::new();
    header.write(&mut out);
    let _ = writeln!(out, "{}", RUN_COLUMNS.join(","));
    for r in rows {
        let _ = writeln!(out, "{}", run_fields(r).join(","));
    }
    Ok(out)
}

/// Baseline table; `row` indexes the run the baseline belongs to.
pub fn emit_baseline_csv(reports: &[Report], header: &Header) -> Result<String> {
    if reports.is_empty() {
        return Err(HarnessError::EmptyReport);
    }
    let mut out = String::new();
    header.write(&mut out);
    let _ = writeln!(out, "{}", BASELINE_COLUMNS.join(","));
    for (i, rep) in reports.iter().enumerate() {
        for b in &rep.baselines {
            let _ = writeln!(out, "{}", baseline_fields(&rep.row.scenario, i, b).join(","));
        }
    }
    Ok(out)
}

/// Checkpoint table: `time, tr_rho_1.., bias_p1, bias_p2, bias_pinf`.
pub fn emit_trajectory_csv(rows: &[TrajectoryRow], header: &Header) -> Result<String> {
    let first = rows.first().ok_or(HarnessError::EmptyReport)?;
    let mut out = String::new();
    header.write(&mut out);
    let mut cols = vec!["time".to_string()];
    cols.extend((0..first.traces.len()).map(|i| format!("tr_rho_{i}")));
    cols.extend(["bias_p1", "bias_p2", "bias_pinf"].map(String::from));
    let _ = writeln!(out, "{}", cols.join(","));
    for r in rows {
        let mut f = vec![num(r.time)];
        f.extend(r.traces.iter().map(|&t| num(t)));
        f.extend([num(r.bias_p1), num(r.bias_p2), num(r.bias_pinf)]);
        let _ = writeln!(out, "{}", f.join(","));
    }
    Ok(out)
}

/// Human-readable summary of one or more runs.
pub fn summary_text(reports: &[Report], header: &Header) -> Result<String> {
    if reports.is_empty() {
        return Err(HarnessError::EmptyReport);
    }
    let mut out = String::new();
    let _ = writeln!(out, "scenario {} (seed {}, git {}, config {})", header.scenario, header.seed, GIT_DESCRIBE, &header.config_hash[..12]);
    for (k, v) in &header.extra {
        let _ = writeln!(out, "{k}: {v}");
    }
    for rep in reports {
        let r = &rep.row;
        let _ = writeln!(out);
        let _ = writeln!(out, "lambda = {:.6}  T = {}  Q = {}  C = {:.6}  M = {}", r.lambda, r.horizon, r.nodes, r.c, r.realizations);
        if let Some(e) = r.epsilon1 {
            let _ = writeln!(out, "  per-gate error epsilon1 = {e:.6e}");
        }
        let _ = writeln!(out, "  bias (ODE)      p=1 {:.6e}  p=2 {:.6e}  p=inf {:.6e}", r.bias_p1, r.bias_p2, r.bias_pinf);
        let _ = writeln!(out, "  trace distance  {:.6e}  fidelity {:.12}", r.trace_distance, r.fidelity);
        let _ = writeln!(out, "  Monte-Carlo     error {:.6e}  stderr {:.3e}  vs ODE {:.3e}", r.mc_error_p1, r.mc_stderr, r.mc_vs_ode_p1);
        if let Some(lb) = r.distance_lb {
            let _ = writeln!(out, "  channel distance lower bound {lb:.6e}");
        }
        let _ = writeln!(
            out,
            "  bounds          two-node {}  q-node {}  general {}  total {}",
            opt(r.bound_two_node),
            opt(r.bound_qnode),
            opt(r.bound_general),
            opt(r.bound_total)
        );
        let _ = writeln!(
            out,
            "  gates           realized {:.4} +- {:.4}  bound {:.4}  (mean segments {:.4})",
            r.gates_realized_mean, r.gates_realized_stderr, r.gates_bound, r.segments_mean
        );
        for b in &rep.baselines {
            let _ = writeln!(
                out,
                "  baseline {:?} N={}: error {:.6e} +- {:.2e}, gates {:.4}",
                b.kind, b.n, b.error_p1, b.stderr, b.gates_realized_mean
            );
        }
        for c in &rep.checks {
            let verdict = if c.passed() { "ok" } else { "VIOLATED" };
            let _ = writeln!(out, "  [{verdict}] {}: {:.6e} vs {:.6e}", c.name, c.measured, c.bound);
        }
    }
    Ok(out)
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.to_path_buf(), source })?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_rows_are_an_error() {
        let h = Header { scenario: "x".into(), seed: 0, config_hash: "0".repeat(64), extra: vec![] };
        assert!(matches!(emit_csv(&[], &h), Err(HarnessError::EmptyReport)));
        assert!(matches!(summary_text(&[], &h), Err(HarnessError::EmptyReport)));
        assert!(matches!(emit_trajectory_csv(&[], &h), Err(HarnessError::EmptyReport)));
    }

    #[test]
    fn number_format_is_fixed() {
        assert_eq!(num(0.1), "1.000000000000e-1");
        assert_eq!(opt(None), "NA");
    }
}
