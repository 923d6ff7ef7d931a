//! The sequential optimisation loop: initial design, per-iteration
//! standardisation, mean and GP fitting, acquisition maximisation and
//! evaluation, plus grid expansion with paired seeds.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acquisition::{maximise_acquisition, AcquisitionError, AcquisitionSpec};
use crate::benchmarks::{simple_regret, BenchmarkError, BenchmarkProblem, MICHALEWICZ_M};
use crate::design::{latin_hypercube, DEFAULT_LHS_CANDIDATES};
use crate::gp::{
    build_posterior, default_nugget, euclidean, fit_hyperparameters, Dataset, GpError,
    KernelHyperparams, GP_RESTARTS,
};
use crate::mean::{fit_mean, MeanError, MeanKind, MeanSpec, MeanSummary};
use crate::rng::{derive_seed, substream};

/// Version of the JSON-lines record layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Standard deviations below this are treated as zero when standardising.
pub const STD_FLOOR: f64 = 1e-12;

pub const DEFAULT_BUDGET: usize = 200;

/// Proposals closer than this to an existing datum are perturbed.
pub const DUPLICATE_TOLERANCE: f64 = 1e-8;
pub const DUPLICATE_RADIUS: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Benchmark(#[from] BenchmarkError),
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error(transparent)]
    Mean(#[from] MeanError),
    #[error(transparent)]
    Acquisition(#[from] AcquisitionError),
    #[error("malformed record: {0}")]
    Record(String),
}

/// Affine map `(f - mu_hat) / s_hat` with the population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Standardisation {
    pub mu_hat: f64,
    pub s_hat: f64,
}

impl Standardisation {
    pub fn apply(&self, f: f64) -> f64 {
        (f - self.mu_hat) / self.s_hat
    }

    pub fn invert(&self, f_std: f64) -> f64 {
        f_std * self.s_hat + self.mu_hat
    }
}

/// Centres and scales `f`; a spread below [`STD_FLOOR`] leaves the scale at 1.
///
/// # Panics
/// Panics if `f` is empty.
pub fn standardise(f: &[f64]) -> (Vec<f64>, Standardisation) {
    assert!(!f.is_empty(), "cannot standardise an empty vector");
    let n = f.len() as f64;
    let mu_hat = f.iter().sum::<f64>() / n;
    let var = f.iter().map(|v| (v - mu_hat).powi(2)).sum::<f64>() / n;
    let sd = var.sqrt();
    let s_hat = if sd < STD_FLOOR { 1.0 } else { sd };
    let st = Standardisation { mu_hat, s_hat };
    (f.iter().map(|&v| st.apply(v)).collect(), st)
}

pub fn unstandardise(f_std: &[f64], st: &Standardisation) -> Vec<f64> {
    f_std.iter().map(|&v| st.invert(v)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: String,
    pub mean: MeanSpec,
    pub acquisition: AcquisitionSpec,
    /// Size of the initial Latin hypercube design.
    pub initial_samples: usize,
    /// Total number of expensive evaluations, including the initial design.
    pub budget: usize,
    pub seed: u64,
    pub gp_restarts: usize,
    pub lhs_candidates: usize,
}

impl RunConfig {
    /// Defaults: `2 d` initial samples, a budget of 200 and 10 GP restarts.
    pub fn new(
        problem: &str,
        mean: MeanSpec,
        acquisition: AcquisitionSpec,
        seed: u64,
    ) -> Result<Self, EngineError> {
        let p = BenchmarkProblem::by_name(problem)?;
        Ok(Self {
            problem: p.name().to_string(),
            mean,
            acquisition,
            initial_samples: 2 * p.dim(),
            budget: DEFAULT_BUDGET,
            seed,
            gp_restarts: GP_RESTARTS,
            lhs_candidates: DEFAULT_LHS_CANDIDATES,
        })
    }

    pub fn validate(&self) -> Result<BenchmarkProblem, EngineError> {
        let p = BenchmarkProblem::by_name(&self.problem)?;
        if self.initial_samples < 2 {
            return Err(EngineError::InvalidConfig(format!(
                "initial_samples must be at least 2, got {}",
                self.initial_samples
            )));
        }
        if self.budget < self.initial_samples {
            return Err(EngineError::InvalidConfig(format!(
                "budget {} is smaller than initial_samples {}",
                self.budget, self.initial_samples
            )));
        }
        if self.lhs_candidates == 0 {
            return Err(EngineError::InvalidConfig("lhs_candidates must be positive".into()));
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub dim: usize,
    pub f_star: f64,
    /// Standard deviation convention used for standardisation.
    pub std_convention: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub michalewicz_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHeader {
    pub schema_version: u32,
    pub config: RunConfig,
    pub metadata: RunMetadata,
}

/// One expensive evaluation. Model fields are absent for the initial design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based evaluation count.
    pub t: usize,
    pub x_unit: Vec<f64>,
    pub f: f64,
    pub best_so_far: f64,
    pub regret: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub standardisation: Option<Standardisation>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theta: Option<KernelHyperparams>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mean: Option<MeanSummary>,
    /// Incumbent passed to the acquisition, in standardised units.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub f_best_std: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub acquisition_value: Option<f64>,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub gp_fallback: bool,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub perturbed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFooter {
    pub complete: bool,
    pub evaluations: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub terminal_best: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub terminal_regret: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// A line of a record file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RecordLine {
    Header(RunHeader),
    Iteration(IterationRecord),
    Footer(RunFooter),
}

impl RecordLine {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record lines always serialise")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub header: RunHeader,
    pub iterations: Vec<IterationRecord>,
    pub footer: RunFooter,
}

impl RunRecord {
    pub fn config(&self) -> &RunConfig {
        &self.header.config
    }

    pub fn is_complete(&self) -> bool {
        self.footer.complete
    }

    pub fn terminal_regret(&self) -> Option<f64> {
        self.iterations.last().map(|it| it.regret)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = RecordLine::Header(self.header.clone()).to_json();
        out.push('\n');
        for it in &self.iterations {
            out.push_str(&RecordLine::Iteration(it.clone()).to_json());
            out.push('\n');
        }
        out.push_str(&RecordLine::Footer(self.footer.clone()).to_json());
        out.push('\n');
        out
    }

    /// Parses a record file. A missing footer (interrupted run) is reported
    /// as an incomplete record rather than an error.
    pub fn from_jsonl(text: &str) -> Result<Self, EngineError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = match lines.next().map(serde_json::from_str::<RecordLine>) {
            Some(Ok(RecordLine::Header(h))) => h,
            Some(Ok(_)) => return Err(EngineError::Record("first line is not a header".into())),
            Some(Err(e)) => return Err(EngineError::Record(e.to_string())),
            None => return Err(EngineError::Record("empty record".into())),
        };
        if header.schema_version != SCHEMA_VERSION {
            return Err(EngineError::Record(format!(
                "unsupported schema_version {}",
                header.schema_version
            )));
        }
        let mut iterations = Vec::new();
        let mut footer = None;
        for line in lines {
            match serde_json::from_str::<RecordLine>(line) {
                Ok(RecordLine::Iteration(it)) if footer.is_none() => iterations.push(it),
                Ok(RecordLine::Footer(f)) if footer.is_none() => footer = Some(f),
                Ok(_) => return Err(EngineError::Record("unexpected line order".into())),
                Err(e) => return Err(EngineError::Record(e.to_string())),
            }
        }
        let footer = footer.unwrap_or(RunFooter {
            complete: false,
            evaluations: iterations.len(),
            terminal_best: iterations.last().map(|it| it.best_so_far),
            terminal_regret: iterations.last().map(|it| it.regret),
            error: Some("record truncated".into()),
        });
        Ok(Self {
            header,
            iterations,
            footer,
        })
    }
}

struct RunState<'a> {
    problem: &'a BenchmarkProblem,
    x: Vec<Vec<f64>>,
    f: Vec<f64>,
    best: f64,
}

impl RunState<'_> {
    fn evaluate(&mut self, x_unit: Vec<f64>) -> Result<IterationRecord, EngineError> {
        let f = self.problem.evaluate(&x_unit)?;
        if !f.is_finite() {
            return Err(EngineError::Benchmark(BenchmarkError::InvalidArgument(format!(
                "objective returned {f}"
            ))));
        }
        self.best = self.best.min(f);
        let regret = simple_regret(self.problem.f_star(), self.best)?;
        self.x.push(x_unit.clone());
        self.f.push(f);
        Ok(IterationRecord {
            t: self.f.len(),
            x_unit,
            f,
            best_so_far: self.best,
            regret,
            standardisation: None,
            theta: None,
            lambda: None,
            gamma: None,
            mean: None,
            f_best_std: None,
            acquisition_value: None,
            gp_fallback: false,
            perturbed: false,
            wall_time_s: None,
        })
    }
}

/// Runs the optimisation loop described by `config`.
pub fn run_bo(config: &RunConfig) -> Result<RunRecord, EngineError> {
    run_bo_streaming(config, |_| {})
}

/// As [`run_bo`], handing every record line to `sink` as soon as it exists.
///
/// Invalid configurations are returned as errors; failures during the run
/// end the record early with an incomplete footer.
pub fn run_bo_streaming<S: FnMut(&RecordLine)>(
    config: &RunConfig,
    mut sink: S,
) -> Result<RunRecord, EngineError> {
    let problem = config.validate()?;
    let header = RunHeader {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        metadata: RunMetadata {
            dim: problem.dim(),
            f_star: problem.f_star(),
            std_convention: "population".into(),
            michalewicz_m: (problem.name() == "Michalewicz").then_some(MICHALEWICZ_M),
        },
    };
    sink(&RecordLine::Header(header.clone()));

    let mut iterations = Vec::with_capacity(config.budget);
    let result = run_loop(config, &problem, |it| {
        sink(&RecordLine::Iteration(it.clone()));
        iterations.push(it);
    });
    let footer = RunFooter {
        complete: result.is_ok(),
        evaluations: iterations.len(),
        terminal_best: iterations.last().map(|it| it.best_so_far),
        terminal_regret: iterations.last().map(|it| it.regret),
        error: result.err().map(|e| e.to_string()),
    };
    if let Some(e) = &footer.error {
        log::warn!("run on {} stopped after {} evaluations: {e}", config.problem, footer.evaluations);
    }
    sink(&RecordLine::Footer(footer.clone()));
    Ok(RunRecord {
        header,
        iterations,
        footer,
    })
}

fn run_loop<E: FnMut(IterationRecord)>(
    config: &RunConfig,
    problem: &BenchmarkProblem,
    mut emit: E,
) -> Result<(), EngineError> {
    let d = problem.dim();
    let seed = config.seed;
    let mut state = RunState {
        problem,
        x: Vec::with_capacity(config.budget),
        f: Vec::with_capacity(config.budget),
        best: f64::INFINITY,
    };

    let design = latin_hypercube(config.initial_samples, d, derive_seed(seed, "lhs", &[]), config.lhs_candidates);
    for x in design.points {
        emit(state.evaluate(x)?);
    }

    let mut incumbent: Option<KernelHyperparams> = None;
    while state.f.len() < config.budget {
        let n = state.f.len();
        let step = n as u64;
        let (f_std, st) = standardise(&state.f);
        let f_best = f_std.iter().copied().fold(f64::INFINITY, f64::min);
        let data = Dataset::new(state.x.clone(), f_std)?;

        let spec = config
            .mean
            .with_seeds(derive_seed(seed, "cv", &[step]), derive_seed(seed, "forest", &[step]));
        let fitted = fit_mean(&spec, &data)?;
        let summary = fitted.summary();
        let (lambda, gamma) = (fitted.lambda(), fitted.gamma());

        let fit = fit_hyperparameters(
            &data,
            &fitted,
            config.gp_restarts,
            derive_seed(seed, "gp-restarts", &[step]),
            incumbent.as_ref(),
        );
        incumbent = Some(fit.hyper);
        let gp = build_posterior(data, Arc::new(fitted), fit.hyper, default_nugget(&fit.hyper))?;

        let proposal = maximise_acquisition(
            &gp,
            &config.acquisition,
            f_best,
            n,
            derive_seed(seed, "acq", &[step]),
        )?;
        let (x_next, perturbed) = separate_from_data(proposal.x, &state.x, seed, step);

        let mut it = state.evaluate(x_next)?;
        it.standardisation = Some(st);
        it.theta = Some(fit.hyper);
        it.lambda = lambda;
        it.gamma = gamma;
        it.mean = Some(summary);
        it.f_best_std = Some(f_best);
        it.acquisition_value = Some(proposal.value);
        it.gp_fallback = fit.fallback;
        it.perturbed = perturbed;
        emit(it);
    }
    Ok(())
}

/// Moves `x` by a seeded uniform draw from a small ball when it (nearly)
/// coincides with an existing datum.
fn separate_from_data(x: Vec<f64>, data: &[Vec<f64>], seed: u64, step: u64) -> (Vec<f64>, bool) {
    if !data.iter().any(|p| euclidean(p, &x) < DUPLICATE_TOLERANCE) {
        return (x, false);
    }
    let mut rng = substream(seed, "dup", &[step]);
    let d = x.len();
    let offset = loop {
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm <= 1.0 && norm > 0.0 {
            break v;
        }
    };
    let moved = x
        .iter()
        .zip(&offset)
        .map(|(a, o)| (a + DUPLICATE_RADIUS * o).clamp(0.0, 1.0))
        .collect();
    (moved, true)
}

/// A grid of runs: every problem, acquisition, mean and repeat combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub problems: Vec<String>,
    pub means: Vec<MeanSpec>,
    pub acquisitions: Vec<AcquisitionSpec>,
    pub repeats: usize,
    pub base_seed: u64,
    /// `None` means `2 d` for each problem.
    pub initial_samples: Option<usize>,
    pub budget: usize,
    pub gp_restarts: usize,
    pub lhs_candidates: usize,
}

impl GridSpec {
    pub fn new(
        problems: Vec<String>,
        means: Vec<MeanSpec>,
        acquisitions: Vec<AcquisitionSpec>,
        repeats: usize,
        base_seed: u64,
    ) -> Self {
        Self {
            problems,
            means,
            acquisitions,
            repeats,
            base_seed,
            initial_samples: None,
            budget: DEFAULT_BUDGET,
            gp_restarts: GP_RESTARTS,
            lhs_candidates: DEFAULT_LHS_CANDIDATES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub problem: String,
    pub acquisition: String,
    pub mean: MeanKind,
    pub repeat: usize,
    pub config: RunConfig,
}

/// The seed shared by every mean function at one (problem, acquisition,
/// repeat); this is what pairs the initial designs.
pub fn paired_seed(base_seed: u64, problem: &str, acquisition: &str, repeat: usize) -> u64 {
    derive_seed(base_seed, &format!("run/{problem}/{acquisition}"), &[repeat as u64])
}

/// Expands `grid` into its cells in problem, acquisition, mean, repeat order.
pub fn grid_cells(grid: &GridSpec) -> Result<Vec<GridCell>, EngineError> {
    if grid.repeats == 0 {
        return Err(EngineError::InvalidConfig("repeats must be at least 1".into()));
    }
    let mut cells = Vec::new();
    for problem in &grid.problems {
        let p = BenchmarkProblem::by_name(problem)?;
        for acq in &grid.acquisitions {
            for mean in &grid.means {
                for repeat in 0..grid.repeats {
                    let config = RunConfig {
                        problem: p.name().to_string(),
                        mean: mean.clone(),
                        acquisition: acq.clone(),
                        initial_samples: grid.initial_samples.unwrap_or(2 * p.dim()),
                        budget: grid.budget,
                        seed: paired_seed(grid.base_seed, p.name(), acq.kind.name(), repeat),
                        gp_restarts: grid.gp_restarts,
                        lhs_candidates: grid.lhs_candidates,
                    };
                    config.validate()?;
                    cells.push(GridCell {
                        problem: p.name().to_string(),
                        acquisition: acq.kind.name().to_string(),
                        mean: mean.kind,
                        repeat,
                        config,
                    });
                }
            }
        }
    }
    Ok(cells)
}

/// Runs every cell of `grid` on the current rayon pool. Results are in cell
/// order; a failing cell does not stop the others.
pub fn run_grid(grid: &GridSpec) -> Result<Vec<(GridCell, Result<RunRecord, EngineError>)>, EngineError> {
    let cells = grid_cells(grid)?;
    Ok(cells
        .into_par_iter()
        .map(|cell| {
            let rec = run_bo(&cell.config);
            (cell, rec)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acquisition::AcquisitionKind;
    use proptest::prelude::*;

    fn toy_config(kind: MeanKind, budget: usize, seed: u64) -> RunConfig {
        let mut c = RunConfig::new(
            "Toy1dConvex",
            MeanSpec::new(kind),
            AcquisitionSpec::new(AcquisitionKind::ExpectedImprovement),
            seed,
        )
        .unwrap();
        c.budget = budget;
        c
    }

    #[test]
    fn standardise_examples() {
        let (s, st) = standardise(&[0.0, 2.0]);
        assert_eq!(s, vec![-1.0, 1.0]);
        assert_eq!(st.s_hat, 1.0);
        let (s, st) = standardise(&[4.0, 4.0, 4.0]);
        assert_eq!(s, vec![0.0; 3]);
        assert_eq!(st.s_hat, 1.0);
        assert_eq!(st.mu_hat, 4.0);
    }

    proptest! {
        #[test]
        fn standardise_moments_and_round_trip(
            f in proptest::collection::vec(-1e3f64..1e3, 1..40)
        ) {
            let (s, st) = standardise(&f);
            let n = s.len() as f64;
            let mean = s.iter().sum::<f64>() / n;
            prop_assert!(mean.abs() < 1e-12);
            if st.s_hat != 1.0 || f.len() > 1 {
                let var = s.iter().map(|v| v * v).sum::<f64>() / n;
                let spread = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                    - f.iter().cloned().fold(f64::INFINITY, f64::min);
                if spread > 1e-9 {
                    prop_assert!((var - 1.0).abs() < 1e-10);
                }
            }
            for (a, b) in unstandardise(&s, &st).iter().zip(&f) {
                prop_assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn budget_equal_to_design_fits_no_model() {
        let c = toy_config(MeanKind::Arithmetic, 2, 5);
        let rec = run_bo(&c).unwrap();
        assert!(rec.is_complete());
        assert_eq!(rec.iterations.len(), 2);
        assert!(rec.iterations.iter().all(|it| it.theta.is_none() && it.mean.is_none()));
    }

    #[test]
    fn record_invariants_and_round_trip() {
        let c = toy_config(MeanKind::Quadratic, 8, 11);
        let rec = run_bo(&c).unwrap();
        assert!(rec.is_complete());
        assert_eq!(rec.iterations.len(), 8);
        let f_star = 0.0;
        let mut prev = f64::INFINITY;
        for (i, it) in rec.iterations.iter().enumerate() {
            assert_eq!(it.t, i + 1);
            assert!(it.best_so_far <= prev);
            prev = it.best_so_far;
            assert_eq!(it.regret, (f_star - it.best_so_far).abs());
            if i >= 2 {
                assert!(it.theta.is_some() && it.lambda.is_some());
            }
        }
        let back = RunRecord::from_jsonl(&rec.to_jsonl()).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn identical_configs_give_identical_records() {
        let c = toy_config(MeanKind::Rbf, 7, 3);
        assert_eq!(run_bo(&c).unwrap().to_jsonl(), run_bo(&c).unwrap().to_jsonl());
    }

    #[test]
    fn streaming_matches_record() {
        let c = toy_config(MeanKind::Min, 5, 9);
        let mut text = String::new();
        let rec = run_bo_streaming(&c, |line| {
            text.push_str(&line.to_json());
            text.push('\n');
        })
        .unwrap();
        assert_eq!(text, rec.to_jsonl());
    }

    #[test]
    fn truncated_record_reads_as_incomplete() {
        let rec = run_bo(&toy_config(MeanKind::Max, 4, 1)).unwrap();
        let text = rec.to_jsonl();
        let cut: Vec<&str> = text.lines().take(3).collect();
        let back = RunRecord::from_jsonl(&cut.join("\n")).unwrap();
        assert!(!back.is_complete());
        assert_eq!(back.iterations.len(), 2);
    }

    #[test]
    fn invalid_configs() {
        let mut c = toy_config(MeanKind::Arithmetic, 5, 0);
        c.initial_samples = 1;
        assert!(matches!(run_bo(&c), Err(EngineError::InvalidConfig(_))));
        let mut c = toy_config(MeanKind::Arithmetic, 5, 0);
        c.budget = 1;
        assert!(run_bo(&c).is_err());
        c.problem = "Nope".into();
        assert!(matches!(c.validate(), Err(EngineError::Benchmark(_))));
    }

    #[test]
    fn duplicate_guard_moves_within_ball() {
        let data = vec![vec![0.5, 1.0]];
        let (x, moved) = separate_from_data(vec![0.5, 1.0], &data, 1, 2);
        assert!(moved);
        let dist = euclidean(&x, &data[0]);
        assert!(dist > 0.0 && dist <= DUPLICATE_RADIUS);
        assert!(x.iter().all(|v| (0.0..=1.0).contains(v)));
        let (y, moved) = separate_from_data(vec![0.2, 0.2], &data, 1, 2);
        assert!(!moved);
        assert_eq!(y, vec![0.2, 0.2]);
    }

    #[test]
    fn grid_pairs_initial_designs() {
        let mut grid = GridSpec::new(
            vec!["Toy1dConvex".into(), "Toy1dSmooth".into()],
            vec![MeanSpec::new(MeanKind::Min), MeanSpec::new(MeanKind::Linear)],
            vec![AcquisitionSpec::new(AcquisitionKind::UpperConfidenceBound)],
            3,
            42,
        );
        grid.budget = 4;
        let out = run_grid(&grid).unwrap();
        assert_eq!(out.len(), 12);
        for (cell, rec) in &out {
            let rec = rec.as_ref().unwrap();
            let twin = out
                .iter()
                .find(|(c, _)| {
                    c.problem == cell.problem && c.repeat == cell.repeat && c.mean != cell.mean
                })
                .unwrap();
            let twin = twin.1.as_ref().unwrap();
            assert_eq!(rec.iterations[..2], twin.iterations[..2]);
            assert_eq!(rec.config().budget, 4);
        }
    }
}
