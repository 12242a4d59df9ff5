//! Scenario runner behind the `mpsolve` binary.
//!
//! Each subcommand is a plain function returning an in-memory result plus a
//! writer that turns it into files, so tests can use either layer.

use std::path::PathBuf;

use thiserror::Error;

pub mod compare;
pub mod converge;
pub mod output;
pub mod run;
pub mod scenario;

pub use compare::{compare_dirac, write_comparison, DiracComparison, DiracRow};
pub use converge::{converge, write_convergence, ConvergenceRow, ConvergenceTable};
pub use run::{run, write_run, RunOutput, RunSummary};
pub use scenario::{parse_scenario, parse_scenario_str, ScenarioConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid scenario:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Engine(#[from] mpsolve_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 for bad input, 2 for failures while computing or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Usage(_) => 1,
            CliError::Engine(_) | CliError::Io { .. } => 2,
        }
    }
}
