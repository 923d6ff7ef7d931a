//! Experiment configuration files (TOML).

use std::path::Path;

use gpbo::acquisition::{AcquisitionKind, AcquisitionSpec, MultistartParams};
use gpbo::benchmarks::BenchmarkProblem;
use gpbo::design::DEFAULT_LHS_CANDIDATES;
use gpbo::engine::{GridSpec, DEFAULT_BUDGET};
use gpbo::gp::GP_RESTARTS;
use gpbo::mean::{MeanKind, MeanSpec, RbfDistance};
use serde::{Deserialize, Serialize};

use crate::CliError;

fn default_repeats() -> usize {
    51
}
fn default_budget() -> usize {
    DEFAULT_BUDGET
}
fn default_restarts() -> usize {
    GP_RESTARTS
}
fn default_lhs_candidates() -> usize {
    DEFAULT_LHS_CANDIDATES
}
fn default_delta() -> f64 {
    0.1
}
fn default_n_local() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultistartConfig {
    #[serde(default)]
    pub n_raw: Option<usize>,
    #[serde(default = "default_n_local")]
    pub n_local: usize,
}

impl Default for MultistartConfig {
    fn default() -> Self {
        Self {
            n_raw: None,
            n_local: default_n_local(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problems: Vec<String>,
    pub means: Vec<MeanKind>,
    pub acquisitions: Vec<AcquisitionKind>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Initial design size; `2 d` when absent.
    #[serde(default)]
    pub initial_samples: Option<usize>,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_restarts")]
    pub gp_restarts: usize,
    #[serde(default = "default_lhs_candidates")]
    pub lhs_candidates: usize,
    #[serde(default = "default_delta")]
    pub ucb_delta: f64,
    #[serde(default)]
    pub rbf_distance: RbfDistance,
    #[serde(default)]
    pub multistart: MultistartConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.problems.is_empty() || self.means.is_empty() || self.acquisitions.is_empty() {
            return usage("problems, means and acquisitions must be non-empty".into());
        }
        for p in &self.problems {
            if let Err(e) = BenchmarkProblem::by_name(p) {
                return usage(e.to_string());
            }
        }
        for (name, list) in [
            ("problems", self.problems.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
            ("means", self.means.iter().map(|m| m.to_string()).collect()),
            ("acquisitions", self.acquisitions.iter().map(|a| a.to_string()).collect()),
        ] {
            let mut sorted = list.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != list.len() {
                return usage(format!("duplicate entry in {name}"));
            }
        }
        if self.repeats == 0 {
            return usage("repeats must be at least 1".into());
        }
        if !(self.ucb_delta > 0.0 && self.ucb_delta < 1.0) {
            return usage(format!("ucb_delta must lie in (0, 1), got {}", self.ucb_delta));
        }
        if self.multistart.n_local == 0 || self.multistart.n_raw == Some(0) {
            return usage("multistart counts must be positive".into());
        }
        gpbo::engine::grid_cells(&self.grid()).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(())
    }

    pub fn grid(&self) -> GridSpec {
        let means = self
            .means
            .iter()
            .map(|k| {
                let mut s = MeanSpec::new(*k);
                s.rbf_distance = self.rbf_distance;
                s
            })
            .collect();
        let acquisitions = self
            .acquisitions
            .iter()
            .map(|k| {
                let mut s = AcquisitionSpec::new(*k);
                s.ucb_delta = self.ucb_delta;
                s.multistart = MultistartParams {
                    n_raw: self.multistart.n_raw,
                    n_local: self.multistart.n_local,
                    seed: 0,
                };
                s
            })
            .collect();
        let mut grid = GridSpec::new(self.problems.clone(), means, acquisitions, self.repeats, self.base_seed);
        grid.initial_samples = self.initial_samples;
        grid.budget = self.budget;
        grid.gp_restarts = self.gp_restarts;
        grid.lhs_candidates = self.lhs_candidates;
        grid
    }
}
