//! Batch front-end: loads a run configuration, executes one scenario and
//! produces a JSON report.

pub mod app;
pub mod checks;
pub mod config;
pub mod report;
pub mod scenarios;

pub use checks::{CheckRecord, CheckSpec, Criterion, Recorder, CATALOG};
pub use config::{RunConfig, Scenario};
pub use report::Report;
pub use scenarios::{run, RunOptions};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical abort: {context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: sigma_forge::Error,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn numerical(context: impl Into<String>, source: sigma_forge::Error) -> Self {
        CliError::Numerical {
            context: context.into(),
            source,
        }
    }

    /// Process exit status: 2 for configuration problems, 3 for numerical
    /// aborts and i/o failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } | CliError::Io(_) => 3,
        }
    }
}

/// Attaches context to core errors.
pub(crate) trait Context<T> {
    fn ctx(self, what: &str) -> Result<T, CliError>;
}

impl<T> Context<T> for sigma_forge::Result<T> {
    fn ctx(self, what: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::numerical(what, e))
    }
}

/// Every check a run may execute.
pub fn list_checks() -> &'static [CheckSpec] {
    CATALOG
}
