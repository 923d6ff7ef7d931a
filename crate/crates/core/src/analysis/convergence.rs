//! Per-iteration regret summaries for convergence plots.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::stats::{median, quantile};
use super::table::{format_sci, problem_rank};
use super::AnalysisError;
use crate::engine::RunRecord;
use crate::mean::MeanKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub problem: String,
    pub acquisition: String,
    pub mean: MeanKind,
    pub t: usize,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub runs: usize,
}

/// Median and interquartile range of simple regret at every evaluation count,
/// per (problem, acquisition, mean kind). Runs shorter than the longest run
/// of their group are an error.
pub fn convergence_traces(records: &[RunRecord]) -> Result<Vec<ConvergenceRow>, AnalysisError> {
    let mut groups: BTreeMap<((usize, String), String, MeanKind), Vec<&RunRecord>> = BTreeMap::new();
    for rec in records {
        let c = rec.config();
        groups
            .entry((problem_rank(&c.problem), c.acquisition.kind.name().to_string(), c.mean.kind))
            .or_default()
            .push(rec);
    }
    let mut rows = Vec::new();
    for (((_, problem), acquisition, mean), recs) in groups {
        let len = recs.iter().map(|r| r.iterations.len()).max().unwrap_or(0);
        if let Some(short) = recs.iter().find(|r| r.iterations.len() != len) {
            return Err(AnalysisError::InvalidArgument(format!(
                "{problem}/{acquisition}/{mean}: run with seed {} has {} of {len} evaluations",
                short.config().seed,
                short.iterations.len()
            )));
        }
        for t in 0..len {
            let v: Vec<f64> = recs.iter().map(|r| r.iterations[t].regret).collect();
            rows.push(ConvergenceRow {
                problem: problem.clone(),
                acquisition: acquisition.clone(),
                mean,
                t: t + 1,
                median: median(&v)?,
                q25: quantile(&v, 0.25)?,
                q75: quantile(&v, 0.75)?,
                runs: v.len(),
            });
        }
    }
    Ok(rows)
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut s = String::from("problem,acquisition,mean,t,median,q25,q75,runs\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.problem,
            r.acquisition,
            r.mean,
            r.t,
            format_sci(r.median),
            format_sci(r.q25),
            format_sci(r.q75),
            r.runs
        );
    }
    s
}
