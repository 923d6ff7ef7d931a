//! Tables, convergence traces and the surrogate-error study from a finished
//! (or partially finished) experiment directory.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use gpbo::analysis::{build_table, convergence_csv, convergence_traces, run_nrmse_study};
use gpbo::engine::RunRecord;

use crate::manifest::{Manifest, RunStatus};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportKind {
    Table,
    Convergence,
    Nrmse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub kind: ReportKind,
    pub alpha: f64,
    pub train: usize,
    pub test: usize,
    pub seed: u64,
}

impl ReportOptions {
    pub fn new(kind: ReportKind) -> Self {
        Self {
            kind,
            alpha: gpbo::analysis::DEFAULT_ALPHA,
            train: gpbo::analysis::DEFAULT_TRAINING_POINTS,
            test: gpbo::analysis::DEFAULT_TEST_POINTS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOutcome {
    pub files: Vec<PathBuf>,
    /// Runs left out because they, or a paired run, are not complete.
    pub missing: Vec<String>,
}

/// Complete records whose paired runs (same problem, acquisition and seed)
/// are complete for every mean kind, plus the record paths left out.
pub fn load_paired_records(out_dir: &Path) -> Result<(Vec<RunRecord>, Vec<String>), CliError> {
    let manifest = Manifest::load(out_dir)?;
    let mut loaded = Vec::with_capacity(manifest.runs.len());
    for entry in &manifest.runs {
        let path = out_dir.join(&entry.record);
        let rec = if entry.status == RunStatus::Complete {
            let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
            let rec = RunRecord::from_jsonl(&text).map_err(|e| CliError::Corrupt(format!("{}: {e}", path.display())))?;
            rec.is_complete().then_some(rec)
        } else {
            None
        };
        loaded.push(rec);
    }

    let mut broken: BTreeSet<(&str, &str, u64)> = BTreeSet::new();
    for (entry, rec) in manifest.runs.iter().zip(&loaded) {
        if rec.is_none() {
            broken.insert((&entry.problem, &entry.acquisition, entry.seed));
        }
    }
    let mut records = Vec::new();
    let mut missing = Vec::new();
    for (entry, rec) in manifest.runs.iter().zip(loaded) {
        match rec {
            Some(r) if !broken.contains(&(entry.problem.as_str(), entry.acquisition.as_str(), entry.seed)) => {
                records.push(r)
            }
            _ => missing.push(entry.record.clone()),
        }
    }
    Ok((records, missing))
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf, CliError> {
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

/// Writes the requested report under `out_dir/reports/`.
pub fn report(out_dir: &Path, opts: &ReportOptions) -> Result<ReportOutcome, CliError> {
    let (records, missing) = load_paired_records(out_dir)?;
    if !missing.is_empty() {
        log::warn!("partial report: {} runs missing or incomplete", missing.len());
    }
    if records.is_empty() {
        return Err(CliError::Corrupt(format!("no complete runs in {}", out_dir.display())));
    }
    let dir = out_dir.join("reports");
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let files = match opts.kind {
        ReportKind::Table => {
            let table = build_table(&records, opts.alpha)?;
            vec![
                write(dir.join("table.csv"), &table.to_csv())?,
                write(dir.join("table.txt"), &table.to_text())?,
            ]
        }
        ReportKind::Convergence => {
            let rows = convergence_traces(&records)?;
            vec![write(dir.join("convergence.csv"), &convergence_csv(&rows))?]
        }
        ReportKind::Nrmse => {
            let study = run_nrmse_study(&records, opts.train, opts.test, opts.seed)?;
            vec![write(dir.join("nrmse.csv"), &study.to_csv())?]
        }
    };
    Ok(ReportOutcome { files, missing })
}
