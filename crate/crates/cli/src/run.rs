//! Executes an experiment grid into an output directory.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Mutex;

use gpbo::engine::{grid_cells, run_bo_streaming, RunRecord};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::manifest::{Manifest, RunStatus};
use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub executed: usize,
    pub skipped: usize,
    /// `record path: error` for every run that did not complete.
    pub failed: Vec<String>,
}

fn record_is_complete(path: &Path) -> bool {
    fs::read_to_string(path)
        .ok()
        .and_then(|t| RunRecord::from_jsonl(&t).ok())
        .is_some_and(|r| r.is_complete())
}

/// Runs every pending cell of `config` with `jobs` worker threads.
///
/// A fresh directory gets a new manifest. An existing manifest is only
/// reused with `resume`, and then only if it describes the same grid; its
/// completed runs are left untouched.
pub fn run_experiment(
    config: &ExperimentConfig,
    out_dir: &Path,
    jobs: usize,
    resume: bool,
) -> Result<RunSummary, CliError> {
    let grid = config.grid();
    let cells = grid_cells(&grid).map_err(|e| CliError::Usage(e.to_string()))?;
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;

    let mut manifest = if Manifest::path(out_dir).exists() {
        if !resume {
            return Err(CliError::Usage(format!(
                "{} already holds an experiment; pass --resume to continue it",
                out_dir.display()
            )));
        }
        let m = Manifest::load(out_dir)?;
        if m.grid != grid || m.runs.len() != cells.len() {
            return Err(CliError::Usage(format!(
                "the configuration differs from the experiment in {}",
                out_dir.display()
            )));
        }
        m
    } else {
        Manifest::new(grid, &cells)
    };

    let mut pending = Vec::new();
    for (i, entry) in manifest.runs.iter_mut().enumerate() {
        if entry.status == RunStatus::Complete && record_is_complete(&out_dir.join(&entry.record)) {
            continue;
        }
        entry.status = RunStatus::Pending;
        entry.error = None;
        pending.push(i);
    }
    manifest.save(out_dir)?;
    let skipped = cells.len() - pending.len();
    log::info!("{} runs pending, {skipped} already complete", pending.len());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} workers: {e}")))?;
    let manifest = Mutex::new(manifest);
    let save_error: Mutex<Option<CliError>> = Mutex::new(None);

    pool.install(|| {
        pending.par_iter().for_each(|&i| {
            let cell = &cells[i];
            let rel = manifest.lock().expect("manifest lock").runs[i].record.clone();
            let outcome = execute(cell, &out_dir.join(&rel));
            let mut m = manifest.lock().expect("manifest lock");
            let entry = &mut m.runs[i];
            match outcome {
                Ok(()) => entry.status = RunStatus::Complete,
                Err(e) => {
                    log::error!("{rel}: {e}");
                    entry.status = RunStatus::Failed;
                    entry.error = Some(e);
                }
            }
            if let Err(e) = m.save(out_dir) {
                save_error.lock().expect("error lock").get_or_insert(e);
            }
        })
    });

    if let Some(e) = save_error.into_inner().expect("error lock") {
        return Err(e);
    }
    let manifest = manifest.into_inner().expect("manifest lock");
    let failed = manifest
        .runs
        .iter()
        .filter(|r| r.status == RunStatus::Failed)
        .map(|r| format!("{}: {}", r.record, r.error.as_deref().unwrap_or("unknown error")))
        .collect();
    Ok(RunSummary {
        executed: pending.len(),
        skipped,
        failed,
    })
}

/// Runs one cell, streaming its record to `path`.
fn execute(cell: &gpbo::engine::GridCell, path: &Path) -> Result<(), String> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    let file = fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut out = BufWriter::new(file);
    let mut io_error = None;
    let record = run_bo_streaming(&cell.config, |line| {
        if io_error.is_none() {
            if let Err(e) = writeln!(out, "{}", line.to_json()) {
                io_error = Some(e);
            }
        }
    })
    .map_err(|e| e.to_string())?;
    out.flush().map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(e) = io_error {
        return Err(format!("{}: {e}", path.display()));
    }
    match record.footer.error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
