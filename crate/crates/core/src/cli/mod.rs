//! Experiment harness behind the `pcsft` binary.

mod config;
mod report;
mod suites;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{Args, ExperimentConfig, ExperimentKind, FileConfig, DEFAULT_HERMITIAN_SCALE, MAX_DIM};
pub use report::{Aggregate, ConfigEcho, IdentityCheck, NamedComparison, RunReport, TrialRecord, SCHEMA_VERSION};
pub use suites::{run, run_estimate_suite, run_identity_suite, run_robertson_audit, IDENTITY_TOL};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("cannot write report to {}: {source}", path.display())]
    OutputUnwritable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Numeric(#[from] crate::Error),
}

impl CliError {
    /// Process exit status; check failures (status 1) are not errors.
    pub fn exit_code(&self) -> u8 {
        2
    }
}
