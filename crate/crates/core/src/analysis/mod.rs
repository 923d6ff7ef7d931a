//! Statistical post-processing of run records: robust summaries, paired
//! signed-rank tests with Holm correction, comparison tables, convergence
//! traces and the surrogate-error study.

mod convergence;
mod nrmse;
mod stats;
mod table;

use thiserror::Error;

use crate::engine::EngineError;

pub use convergence::{convergence_csv, convergence_traces, ConvergenceRow};
pub use nrmse::{
    fit_surrogate, nrmse, run_nrmse_study, test_points, NrmseEntry, NrmseStudy, Surrogate,
    DEFAULT_TEST_POINTS, DEFAULT_TRAINING_POINTS,
};
pub use stats::{
    average_ranks, holm_bonferroni, median, median_mad, quantile, wilcoxon_one_sided,
    WilcoxonResult, EXACT_MAX_N,
};
pub use table::{build_table, format_sci, ComparisonTable, TableCell, TableEntry, DEFAULT_ALPHA};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unpaired records: {0}")]
    Pairing(String),
    #[error("true values have zero range")]
    ZeroRange,
    #[error(transparent)]
    Engine(#[from] EngineError),
}
