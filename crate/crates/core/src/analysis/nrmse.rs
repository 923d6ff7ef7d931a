//! Model-error study: how well the GP surrogate with each prior mean predicts
//! the objective after a fixed number of evaluations.

use std::fmt::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::benchmarks::BenchmarkProblem;
use crate::design::latin_hypercube;
use crate::engine::{standardise, EngineError, RunRecord, Standardisation};
use crate::gp::{build_posterior, default_nugget, fit_hyperparameters, Dataset, GpPosterior};
use crate::mean::{fit_mean, MeanKind, MeanSpec};
use crate::rng::derive_seed;

pub const DEFAULT_TRAINING_POINTS: usize = 100;
pub const DEFAULT_TEST_POINTS: usize = 1000;

/// Root mean squared error divided by the range of the true values.
pub fn nrmse(f_true: &[f64], f_pred: &[f64]) -> Result<f64, AnalysisError> {
    if f_true.len() != f_pred.len() || f_true.is_empty() {
        return Err(AnalysisError::InvalidArgument(format!(
            "{} true values against {} predictions",
            f_true.len(),
            f_pred.len()
        )));
    }
    let hi = f_true.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = f_true.iter().copied().fold(f64::INFINITY, f64::min);
    if !(hi > lo) {
        return Err(AnalysisError::ZeroRange);
    }
    let mse = f_true.iter().zip(f_pred).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / f_true.len() as f64;
    Ok(mse.sqrt() / (hi - lo))
}

/// A GP fitted on standardised targets, predicting on the raw scale.
#[derive(Debug)]
pub struct Surrogate {
    pub gp: GpPosterior,
    pub standardisation: Standardisation,
}

impl Surrogate {
    /// Posterior mean on the original scale of the training targets.
    pub fn predict_mean(&self, x: &[f64]) -> Result<f64, AnalysisError> {
        let p = self.gp.predict(x).map_err(EngineError::from)?;
        Ok(self.standardisation.invert(p.mu))
    }
}

/// Standardises `f`, fits the mean function and GP hyperparameters the same
/// way one optimisation step does, seeding the fits from `seed`.
pub fn fit_surrogate(
    spec: &MeanSpec,
    x: Vec<Vec<f64>>,
    f: &[f64],
    restarts: usize,
    seed: u64,
) -> Result<Surrogate, AnalysisError> {
    let step = [f.len() as u64];
    let (f_std, standardisation) = standardise(f);
    let data = Dataset::new(x, f_std).map_err(EngineError::from)?;
    let spec = spec.with_seeds(derive_seed(seed, "cv", &step), derive_seed(seed, "forest", &step));
    let mean = fit_mean(&spec, &data).map_err(EngineError::from)?;
    let fit = fit_hyperparameters(&data, &mean, restarts, derive_seed(seed, "gp-restarts", &step), None);
    let gp = build_posterior(data, Arc::new(mean), fit.hyper, default_nugget(&fit.hyper))
        .map_err(EngineError::from)?;
    Ok(Surrogate { gp, standardisation })
}

/// Test locations for one training provenance; identical for all mean kinds
/// that share `run_seed`.
pub fn test_points(d: usize, n: usize, study_seed: u64, run_seed: u64) -> Vec<Vec<f64>> {
    latin_hypercube(n, d, derive_seed(study_seed, "nrmse-test", &[run_seed]), 1).points
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NrmseEntry {
    pub problem: String,
    pub acquisition: String,
    pub mean: MeanKind,
    pub run_seed: u64,
    pub nrmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NrmseStudy {
    pub training_points: usize,
    pub test_points: usize,
    pub entries: Vec<NrmseEntry>,
}

impl NrmseStudy {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("problem,acquisition,mean,run_seed,nrmse\n");
        for e in &self.entries {
            let _ = writeln!(s, "{},{},{},{},{:.6e}", e.problem, e.acquisition, e.mean, e.run_seed, e.nrmse);
        }
        s
    }
}

/// Refits each run's surrogate on its first `n_train` evaluations and scores
/// it on `n_test` Latin hypercube points against the true objective.
pub fn run_nrmse_study(
    records: &[RunRecord],
    n_train: usize,
    n_test: usize,
    seed: u64,
) -> Result<NrmseStudy, AnalysisError> {
    let entries = records
        .par_iter()
        .map(|rec| {
            let c = rec.config();
            if rec.iterations.len() < n_train {
                return Err(AnalysisError::InvalidArgument(format!(
                    "{}/{}/{} seed {}: {} evaluations, {n_train} needed",
                    c.problem,
                    c.acquisition.kind,
                    c.mean.kind,
                    c.seed,
                    rec.iterations.len()
                )));
            }
            let problem = BenchmarkProblem::by_name(&c.problem).map_err(EngineError::from)?;
            let train = &rec.iterations[..n_train];
            let x: Vec<Vec<f64>> = train.iter().map(|it| it.x_unit.clone()).collect();
            let f: Vec<f64> = train.iter().map(|it| it.f).collect();
            let model = fit_surrogate(&c.mean, x, &f, c.gp_restarts, c.seed)?;
            let pts = test_points(problem.dim(), n_test, seed, c.seed);
            let mut truth = Vec::with_capacity(n_test);
            let mut pred = Vec::with_capacity(n_test);
            for p in &pts {
                truth.push(problem.evaluate(p).map_err(EngineError::from)?);
                pred.push(model.predict_mean(p)?);
            }
            Ok(NrmseEntry {
                problem: c.problem.clone(),
                acquisition: c.acquisition.kind.name().to_string(),
                mean: c.mean.kind,
                run_seed: c.seed,
                nrmse: nrmse(&truth, &pred)?,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(NrmseStudy {
        training_points: n_train,
        test_points: n_test,
        entries,
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(nrmse(&[1.0, 2.0, 5.0], &[1.0, 2.0, 5.0]).unwrap(), 0.0);
        assert_eq!(nrmse(&[0.0, 1.0], &[0.5, 0.5]).unwrap(), 0.5);
        assert!(matches!(nrmse(&[2.0, 2.0], &[1.0, 2.0]), Err(AnalysisError::ZeroRange)));
        assert!(nrmse(&[0.0, 1.0], &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn affine_invariance(
            pairs in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 2..30),
            a in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0],
            b in -100.0f64..100.0,
        ) {
            let t: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let p: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            prop_assume!(t.iter().any(|v| (v - t[0]).abs() > 1e-3));
            let base = nrmse(&t, &p).unwrap();
            let ta: Vec<f64> = t.iter().map(|v| a * v + b).collect();
            let pa: Vec<f64> = p.iter().map(|v| a * v + b).collect();
            let moved = nrmse(&ta, &pa).unwrap();
            prop_assert!((base - moved).abs() <= 1e-12 * base.max(1.0));
        }
    }
}
