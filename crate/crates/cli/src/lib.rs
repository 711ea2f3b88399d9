//! Library side of the `workbench` command-line tool.

pub mod config;
pub mod report;
pub mod suites;

use thiserror::Error;
use workbench_core::WorkbenchError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] WorkbenchError),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(WorkbenchError::InvalidParams(_) | WorkbenchError::DimensionTooLarge { .. }) => 2,
            CliError::Io { .. } | CliError::Core(_) => 1,
        }
    }
}
