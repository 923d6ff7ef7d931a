//! Terminal-regret comparison tables.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::stats::{holm_bonferroni, median_mad, wilcoxon_one_sided};
use super::AnalysisError;
use crate::benchmarks::PROBLEM_NAMES;
use crate::engine::RunRecord;
use crate::mean::MeanKind;

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub kind: MeanKind,
    pub median: f64,
    pub mad: f64,
    pub repeats: usize,
    /// One-sided p-value of the best kind against this one.
    pub p_value: Option<f64>,
    pub best: bool,
    /// Not distinguishable from the best after Holm correction.
    pub equivalent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub problem: String,
    pub acquisition: String,
    pub entries: Vec<TableEntry>,
    /// Kinds sharing the lowest median, when the name order decided.
    pub tied_best: Vec<MeanKind>,
}

impl TableCell {
    pub fn best(&self) -> &TableEntry {
        self.entries.iter().find(|e| e.best).expect("every cell has a best entry")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub alpha: f64,
    pub cells: Vec<TableCell>,
}

/// Orders problems as in the standard list, unknown names last.
pub(crate) fn problem_rank(name: &str) -> (usize, String) {
    let idx = PROBLEM_NAMES.iter().position(|p| *p == name).unwrap_or(usize::MAX);
    (idx, name.to_string())
}

type CellKey = ((usize, String), String);

/// Groups complete records into (problem, acquisition) -> kind -> seed -> terminal regret.
fn group(
    records: &[RunRecord],
) -> Result<BTreeMap<CellKey, BTreeMap<MeanKind, BTreeMap<u64, f64>>>, AnalysisError> {
    let mut cells: BTreeMap<CellKey, BTreeMap<MeanKind, BTreeMap<u64, f64>>> = BTreeMap::new();
    for rec in records {
        let c = rec.config();
        if !rec.is_complete() {
            return Err(AnalysisError::InvalidArgument(format!(
                "incomplete record for {} / {} / {} (seed {})",
                c.problem, c.acquisition.kind, c.mean.kind, c.seed
            )));
        }
        let regret = rec
            .terminal_regret()
            .ok_or_else(|| AnalysisError::InvalidArgument("record without evaluations".into()))?;
        let key = (problem_rank(&c.problem), c.acquisition.kind.name().to_string());
        let runs = cells.entry(key).or_default().entry(c.mean.kind).or_default();
        if runs.insert(c.seed, regret).is_some() {
            return Err(AnalysisError::Pairing(format!(
                "duplicate run of {} on {} with seed {}",
                c.mean.kind, c.problem, c.seed
            )));
        }
    }
    Ok(cells)
}

/// Median/MAD of terminal regret per mean kind, the best kind per cell and
/// the kinds statistically equivalent to it.
///
/// Records are paired across kinds by their run seed, which is shared by
/// all kinds at the same (problem, acquisition, repeat).
pub fn build_table(records: &[RunRecord], alpha: f64) -> Result<ComparisonTable, AnalysisError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(AnalysisError::InvalidArgument(format!("alpha {alpha} outside (0, 1)")));
    }
    let mut out = Vec::new();
    for (((_, problem), acquisition), kinds) in group(records)? {
        let seeds: Vec<u64> = kinds.values().next().map(|m| m.keys().copied().collect()).unwrap_or_default();
        for (kind, runs) in &kinds {
            if !runs.keys().copied().eq(seeds.iter().copied()) {
                return Err(AnalysisError::Pairing(format!(
                    "{kind} on {problem}/{acquisition} does not share the repeat seeds of the other kinds"
                )));
            }
        }
        if seeds.len() < 2 {
            return Err(AnalysisError::InvalidArgument(format!(
                "{problem}/{acquisition} needs at least 2 repeats, found {}",
                seeds.len()
            )));
        }

        let mut entries = Vec::new();
        let mut samples = Vec::new();
        for (kind, runs) in &kinds {
            let v: Vec<f64> = runs.values().copied().collect();
            let (median, mad) = median_mad(&v)?;
            entries.push(TableEntry {
                kind: *kind,
                median,
                mad,
                repeats: v.len(),
                p_value: None,
                best: false,
                equivalent: false,
            });
            samples.push(v);
        }

        let lowest = entries.iter().map(|e| e.median).fold(f64::INFINITY, f64::min);
        let mut tied: Vec<usize> = (0..entries.len()).filter(|&i| entries[i].median == lowest).collect();
        tied.sort_by_key(|&i| entries[i].kind.name());
        let best = tied[0];
        entries[best].best = true;
        let tied_best = if tied.len() > 1 {
            tied.iter().map(|&i| entries[i].kind).collect()
        } else {
            Vec::new()
        };

        let others: Vec<usize> = (0..entries.len()).filter(|&i| i != best).collect();
        let mut pvals = Vec::with_capacity(others.len());
        for &i in &others {
            pvals.push(wilcoxon_one_sided(&samples[best], &samples[i])?.p);
        }
        let reject = holm_bonferroni(&pvals, alpha)?;
        for ((&i, p), r) in others.iter().zip(&pvals).zip(&reject) {
            entries[i].p_value = Some(*p);
            entries[i].equivalent = !r;
        }
        out.push(TableCell {
            problem,
            acquisition,
            entries,
            tied_best,
        });
    }
    Ok(ComparisonTable { alpha, cells: out })
}

/// Scientific notation with two decimals and a signed two-digit exponent,
/// e.g. `1.35e-05`.
pub fn format_sci(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{v:.2e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

impl ComparisonTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("problem,acquisition,mean,median,mad,repeats,p_value,best,equivalent\n");
        for cell in &self.cells {
            for e in &cell.entries {
                let p = e.p_value.map(|p| format!("{p:.6e}")).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    cell.problem,
                    cell.acquisition,
                    e.kind,
                    format_sci(e.median),
                    format_sci(e.mad),
                    e.repeats,
                    p,
                    e.best,
                    e.equivalent
                );
            }
        }
        s
    }

    /// Plain-text layout: one block per acquisition function, one row per
    /// problem with `median (MAD)` per mean kind. `*` marks the best kind
    /// and `~` those statistically equivalent to it.
    pub fn to_text(&self) -> String {
        let mut acqs: Vec<&str> = self.cells.iter().map(|c| c.acquisition.as_str()).collect();
        acqs.sort();
        acqs.dedup();
        let mut out = String::new();
        for acq in acqs {
            let cells: Vec<&TableCell> = self.cells.iter().filter(|c| c.acquisition == acq).collect();
            let kinds: Vec<MeanKind> = MeanKind::ALL
                .iter()
                .copied()
                .filter(|k| cells.iter().any(|c| c.entries.iter().any(|e| e.kind == *k)))
                .collect();
            let mut rows = vec![std::iter::once("Problem".to_string())
                .chain(kinds.iter().map(|k| k.to_string()))
                .collect::<Vec<_>>()];
            for cell in &cells {
                let mut row = vec![cell.problem.clone()];
                for k in &kinds {
                    row.push(match cell.entries.iter().find(|e| e.kind == *k) {
                        Some(e) => {
                            let mark = if e.best {
                                "*"
                            } else if e.equivalent {
                                "~"
                            } else {
                                " "
                            };
                            format!("{} ({}){mark}", format_sci(e.median), format_sci(e.mad))
                        }
                        None => "-".to_string(),
                    });
                }
                rows.push(row);
            }
            let widths: Vec<usize> = (0..rows[0].len())
                .map(|j| rows.iter().map(|r| r[j].len()).max().unwrap_or(0))
                .collect();
            let _ = writeln!(out, "{acq} (alpha = {})", self.alpha);
            for row in rows {
                let line: Vec<String> = row
                    .iter()
                    .zip(&widths)
                    .enumerate()
                    .map(|(j, (c, w))| if j == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                    .collect();
                let _ = writeln!(out, "{}", line.join("  ").trim_end());
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_format() {
        assert_eq!(format_sci(1.35e-5), "1.35e-05");
        assert_eq!(format_sci(28.4), "2.84e+01");
        assert_eq!(format_sci(0.0), "0.00e+00");
        assert_eq!(format_sci(-4.64), "-4.64e+00");
        assert_eq!(format_sci(1.2e123), "1.20e+123");
    }
}
