//! Command-line plumbing for running and reporting on experiment grids:
//! TOML configuration, a manifest of runs, one JSON-lines record per run and
//! post-hoc reports.

pub mod config;
pub mod manifest;
pub mod report;
pub mod run;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::ExperimentConfig;
pub use manifest::{Manifest, ManifestEntry, RunStatus};
pub use report::{load_paired_records, report, ReportKind, ReportOptions, ReportOutcome};
pub use run::{run_experiment, RunSummary};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "GPBO_OUT";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Corrupt(String),
    #[error(transparent)]
    Analysis(#[from] gpbo::analysis::AnalysisError),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}
