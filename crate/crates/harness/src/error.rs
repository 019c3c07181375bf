use std::path::PathBuf;

/// Exit codes of the `ctmc` binary.
pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BOUND_VIOLATION: i32 = 3;
pub const EXIT_NON_CONVERGENCE: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    /// Invalid scenario; `path` locates the offending field, e.g. `weights.values[1]`.
    #[error("{path}: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Core(#[from] ctmc_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("report has no rows")]
    EmptyReport,
}

impl HarnessError {
    pub fn config(path: impl Into<String>, message: impl ToString) -> Self {
        Self::Config { path: path.into(), message: message.to_string() }
    }

    /// Attach a field path to a core error raised while validating it.
    pub fn at(path: impl Into<String>) -> impl FnOnce(ctmc_core::Error) -> Self {
        let path = path.into();
        move |e| match e {
            ctmc_core::Error::NonConvergence { .. } => Self::Core(e),
            other => Self::Config { path, message: other.to_string() },
        }
    }

    pub fn exit_code(&self) -> i32 {
        use ctmc_core::Error as E;
        match self {
            Self::Config { .. } | Self::EmptyReport => EXIT_CONFIG,
            Self::Core(E::NonConvergence { .. } | E::NonFinite(_)) => EXIT_NON_CONVERGENCE,
            Self::Core(_) => EXIT_CONFIG,
            Self::Io { .. } => EXIT_IO,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
