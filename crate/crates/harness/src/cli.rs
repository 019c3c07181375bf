//! Command-line verbs of the `ctmc` binary.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use ctmc_core::compiler::compile_sequence;
use ctmc_core::markov::sample_realization;
use ctmc_core::rng::stream;

use crate::error::{HarnessError, Result, EXIT_BOUND_VIOLATION, EXIT_OK};
use crate::report::{emit_baseline_csv, emit_csv, emit_trajectory_csv, summary_text, write_file, Header};
use crate::run::{run_scenario, scenario_bounds};
use crate::scenario::Scenario;
use crate::sweep::{parse_values, sweep, SweepAxis};

#[derive(Debug, Parser)]
#[command(name = "ctmc", version, about = "Continuous-time Markov chain random compiler: runs, sweeps and bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    pub config: PathBuf,
    /// Override the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a scenario file and print the derived rate.
    Validate(Common),
    /// Print one chain realization as JSON.
    Sample(Common),
    /// Print the gate list of one realization as JSON.
    Compile(Common),
    /// Run every oracle and write CSV and summary files.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "reports")]
        out: PathBuf,
    },
    /// Repeat the run along one axis.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "reports")]
        out: PathBuf,
        /// lambda, T, M or N_baseline.
        #[arg(long)]
        axis: String,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
    },
    /// Print the analytic bounds only.
    Bounds(Common),
}

fn load(common: &Common) -> Result<Scenario> {
    if let Some(k) = common.threads {
        if k == 0 {
            return Err(HarnessError::config("--threads", "must be at least 1"));
        }
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    let mut s = Scenario::load(&common.config)?;
    if let Some(seed) = common.seed {
        s.seed = seed;
    }
    Ok(s)
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON value serializes"));
}

fn validate(common: &Common) -> Result<i32> {
    let s = load(common)?;
    let p = s.prepare()?;
    println!("ok: {} (Q = {}, qubits = {}, lambda = {}, C = {})", s.name, p.terms.len(), s.qubits, p.lambda, p.c);
    Ok(EXIT_OK)
}

fn sample(common: &Common, compile: bool) -> Result<i32> {
    let s = load(common)?;
    let p = s.prepare()?;
    let r = sample_realization(&p.scheme, s.horizon, &mut stream(s.seed, 0))?;
    if compile {
        let seq = compile_sequence(&r, &p.terms)?;
        print_json(&json!({ "scenario": s.name, "nodes": p.terms.len(), "total_time": seq.total_time, "gates": seq.circuit() }));
    } else {
        print_json(&json!({ "scenario": s.name, "lambda": p.lambda, "realization": r }));
    }
    Ok(EXIT_OK)
}

fn run(common: &Common, out: &Path) -> Result<i32> {
    let s = load(common)?;
    let report = run_scenario(&s)?;
    let header = Header::for_scenario(&s);
    let reports = std::slice::from_ref(&report);
    write_file(out, &s.csv_name(), &emit_csv(std::slice::from_ref(&report.row), &header)?)?;
    write_file(out, &s.trajectory_name(), &emit_trajectory_csv(&report.trajectory, &header)?)?;
    if !report.baselines.is_empty() {
        write_file(out, &format!("{}_baselines.csv", s.name), &emit_baseline_csv(reports, &header)?)?;
    }
    let summary = summary_text(reports, &header)?;
    write_file(out, &s.summary_name(), &summary)?;
    print!("{summary}");
    Ok(if report.row.violations > 0 { EXIT_BOUND_VIOLATION } else { EXIT_OK })
}

fn run_sweep(common: &Common, out: &Path, axis: &str, values: &str) -> Result<i32> {
    let s = load(common)?;
    let axis: SweepAxis = axis.parse()?;
    let values = parse_values(values)?;
    let result = sweep(&s, axis, &values)?;
    let mut header = Header::for_scenario(&s);
    header.extra.push(("axis".into(), axis.to_string()));
    header.extra.push(("values".into(), values.iter().map(|v| format!("{v:.12e}")).collect::<Vec<_>>().join(" ")));
    if let Some(slope) = result.slope {
        header.extra.push(("slope_log_bias_p1_vs_log_lambda".into(), format!("{slope:.12e}")));
    }
    let rows: Vec<_> = result.reports.iter().map(|r| r.row.clone()).collect();
    let stem = format!("{}_sweep_{}", s.name, axis);
    write_file(out, &format!("{stem}.csv"), &emit_csv(&rows, &header)?)?;
    if result.reports.iter().any(|r| !r.baselines.is_empty()) {
        write_file(out, &format!("{stem}_baselines.csv"), &emit_baseline_csv(&result.reports, &header)?)?;
    }
    let summary = summary_text(&result.reports, &header)?;
    write_file(out, &format!("{stem}.txt"), &summary)?;
    print!("{summary}");
    let violated = rows.iter().any(|r| r.violations > 0);
    Ok(if violated { EXIT_BOUND_VIOLATION } else { EXIT_OK })
}

fn bounds(common: &Common) -> Result<i32> {
    let s = load(common)?;
    let b = scenario_bounds(&s)?;
    let show = |x: Option<f64>| x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.12e}"));
    println!("scenario        {}", s.name);
    println!("lambda          {:.12e}", b.lambda);
    println!("min lambda      {:.12e}", b.min_lambda);
    println!("C               {:.12e}", b.c);
    if let Some(e) = b.epsilon1 {
        println!("epsilon1        {e:.12e}");
    }
    println!("bound_two_node  {}", show(b.bound_two_node));
    println!("bound_qnode     {}", show(b.bound_qnode));
    println!("bound_general   {}", show(b.bound_general));
    println!("bound_total     {}", show(b.bound_total));
    println!("gates_bound     {:.12e}", b.gates_bound);
    Ok(EXIT_OK)
}

/// Run a parsed command line and return the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Validate(c) => validate(c),
        Command::Sample(c) => sample(c, false),
        Command::Compile(c) => sample(c, true),
        Command::Run { common, out } => run(common, out),
        Command::Sweep { common, out, axis, values } => run_sweep(common, out, axis, values),
        Command::Bounds(c) => bounds(c),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
