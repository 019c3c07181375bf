//! Scenario files, end-to-end runs, sweeps and reports for the CTMC random
//! compiler. The `ctmc` binary is a thin wrapper around [`cli`].

pub mod cli;
pub mod error;
pub mod report;
pub mod run;
pub mod scenario;
pub mod sweep;

pub use error::{HarnessError, Result};
pub use run::{run_scenario, scenario_bounds, Report};
pub use scenario::Scenario;
pub use sweep::{sweep, SweepAxis};
