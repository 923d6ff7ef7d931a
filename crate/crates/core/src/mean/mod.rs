//! Prior mean functions fitted to (standardised) observations.
//!
//! Eight kinds are available: four constants (arithmetic mean, median,
//! minimum and maximum of the observations), ridge-regularised linear and
//! quadratic polynomials, a Gaussian RBF network with one centre per
//! observation, and an Extra-Trees regression ensemble. Regularisation
//! strength (and the RBF width) are chosen by five-fold cross-validation.

mod basis;
mod cv;
mod forest;

pub use basis::{design_matrix, polynomial_features, rbf_features, ridge_fit};
pub use cv::{cross_validate, fold_assignment, CvGrid, CvSelection};
pub use forest::{bootstrap_indices, extra_trees_fit, ExtraTrees, ForestParams};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gp::{Dataset, PriorMean};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeanError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("normal equations are singular (lambda = {lambda})")]
    SingularSystem { lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeanKind {
    Arithmetic,
    Median,
    Min,
    Max,
    Linear,
    Quadratic,
    RandomForest,
    #[serde(rename = "RBF")]
    Rbf,
}

impl MeanKind {
    pub const ALL: [MeanKind; 8] = [
        MeanKind::Arithmetic,
        MeanKind::Median,
        MeanKind::Min,
        MeanKind::Max,
        MeanKind::Linear,
        MeanKind::Quadratic,
        MeanKind::RandomForest,
        MeanKind::Rbf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeanKind::Arithmetic => "Arithmetic",
            MeanKind::Median => "Median",
            MeanKind::Min => "Min",
            MeanKind::Max => "Max",
            MeanKind::Linear => "Linear",
            MeanKind::Quadratic => "Quadratic",
            MeanKind::RandomForest => "RandomForest",
            MeanKind::Rbf => "RBF",
        }
    }

    pub fn is_constant(self) -> bool {
        matches!(
            self,
            MeanKind::Arithmetic | MeanKind::Median | MeanKind::Min | MeanKind::Max
        )
    }
}

impl fmt::Display for MeanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeanKind {
    type Err = MeanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MeanKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| MeanError::InvalidArgument(format!("unknown mean function '{s}'")))
    }
}

/// Distance used inside the RBF basis functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RbfDistance {
    /// exp(-gamma |x - z|)
    #[default]
    Euclidean,
    /// exp(-gamma |x - z|^2)
    SquaredEuclidean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanSpec {
    pub kind: MeanKind,
    #[serde(default)]
    pub cv: CvGrid,
    #[serde(default)]
    pub forest: ForestParams,
    #[serde(default)]
    pub rbf_distance: RbfDistance,
}

impl MeanSpec {
    pub fn new(kind: MeanKind) -> Self {
        Self {
            kind,
            cv: CvGrid::default(),
            forest: ForestParams::default(),
            rbf_distance: RbfDistance::default(),
        }
    }

    /// Copy with the CV and forest seeds replaced.
    pub fn with_seeds(&self, cv_seed: u64, forest_seed: u64) -> Self {
        let mut s = self.clone();
        s.cv.seed = cv_seed;
        s.forest.seed = forest_seed;
        s
    }
}

/// A fitted prior mean function.
#[derive(Debug, Clone)]
pub enum FittedMean {
    Constant {
        kind: MeanKind,
        c: f64,
    },
    Polynomial {
        kind: MeanKind,
        weights: Vec<f64>,
        lambda: f64,
    },
    Rbf {
        centres: Vec<Vec<f64>>,
        gamma: f64,
        distance: RbfDistance,
        weights: Vec<f64>,
        lambda: f64,
    },
    Forest(ExtraTrees),
}

/// Serialisable description of a fitted mean, enough to refit it exactly
/// given the training data of the same iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanSummary {
    pub kind: MeanKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub forest: Option<ForestParams>,
}

fn median_of(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Fits one of the four constant mean functions.
pub fn fit_constant(kind: MeanKind, f: &[f64]) -> Result<FittedMean, MeanError> {
    if f.is_empty() {
        return Err(MeanError::InvalidArgument("no observations".into()));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(MeanError::InvalidArgument("non-finite observation".into()));
    }
    let c = match kind {
        MeanKind::Arithmetic => f.iter().sum::<f64>() / f.len() as f64,
        MeanKind::Median => median_of(f),
        MeanKind::Min => f.iter().copied().fold(f64::INFINITY, f64::min),
        MeanKind::Max => f.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        other => {
            return Err(MeanError::InvalidArgument(format!("{other} is not a constant mean")))
        }
    };
    Ok(FittedMean::Constant { kind, c })
}

/// Fits the mean function described by `spec` to `data`.
pub fn fit_mean(spec: &MeanSpec, data: &Dataset) -> Result<FittedMean, MeanError> {
    match spec.kind {
        k if k.is_constant() => fit_constant(k, data.f()),
        MeanKind::Linear | MeanKind::Quadratic => {
            let sel = cross_validate(spec, data)?;
            let h = design_matrix(spec.kind, data.x())?;
            let weights = ridge_fit(&h, data.f(), sel.lambda)?;
            Ok(FittedMean::Polynomial {
                kind: spec.kind,
                weights,
                lambda: sel.lambda,
            })
        }
        MeanKind::Rbf => {
            let sel = cross_validate(spec, data)?;
            let gamma = sel.gamma.expect("RBF selection carries a gamma");
            let centres = data.x().to_vec();
            let h = basis::rbf_matrix(data.x(), &centres, gamma, spec.rbf_distance);
            let weights = ridge_fit(&h, data.f(), sel.lambda)?;
            Ok(FittedMean::Rbf {
                centres,
                gamma,
                distance: spec.rbf_distance,
                weights,
                lambda: sel.lambda,
            })
        }
        MeanKind::RandomForest => Ok(FittedMean::Forest(extra_trees_fit(&spec.forest, data)?)),
        _ => unreachable!(),
    }
}

impl FittedMean {
    pub fn kind(&self) -> MeanKind {
        match self {
            FittedMean::Constant { kind, .. } | FittedMean::Polynomial { kind, .. } => *kind,
            FittedMean::Rbf { .. } => MeanKind::Rbf,
            FittedMean::Forest(_) => MeanKind::RandomForest,
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            FittedMean::Constant { c, .. } => *c,
            FittedMean::Polynomial { kind, weights, .. } => {
                let degree = if *kind == MeanKind::Quadratic { 2 } else { 1 };
                polynomial_features(x, degree)
                    .iter()
                    .zip(weights)
                    .map(|(h, w)| h * w)
                    .sum()
            }
            FittedMean::Rbf {
                centres,
                gamma,
                distance,
                weights,
                ..
            } => centres
                .iter()
                .zip(weights)
                .map(|(z, w)| w * basis::rbf_value(x, z, *gamma, *distance))
                .sum(),
            FittedMean::Forest(forest) => forest.predict(x),
        }
    }

    pub fn lambda(&self) -> Option<f64> {
        match self {
            FittedMean::Polynomial { lambda, .. } | FittedMean::Rbf { lambda, .. } => Some(*lambda),
            _ => None,
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match self {
            FittedMean::Rbf { gamma, .. } => Some(*gamma),
            _ => None,
        }
    }

    pub fn summary(&self) -> MeanSummary {
        let mut s = MeanSummary {
            kind: self.kind(),
            c: None,
            weights: None,
            lambda: self.lambda(),
            gamma: self.gamma(),
            forest: None,
        };
        match self {
            FittedMean::Constant { c, .. } => s.c = Some(*c),
            FittedMean::Polynomial { weights, .. } | FittedMean::Rbf { weights, .. } => {
                s.weights = Some(weights.clone())
            }
            FittedMean::Forest(f) => s.forest = Some(f.params().clone()),
        }
        s
    }
}

impl PriorMean for FittedMean {
    fn value(&self, x: &[f64]) -> f64 {
        self.evaluate(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use rand::Rng;

    fn c_of(m: &FittedMean) -> f64 {
        match m {
            FittedMean::Constant { c, .. } => *c,
            _ => panic!("not constant"),
        }
    }

    #[test]
    fn constant_kinds() {
        assert_eq!(c_of(&fit_constant(MeanKind::Arithmetic, &[1.0, 2.0, 3.0]).unwrap()), 2.0);
        assert_eq!(c_of(&fit_constant(MeanKind::Min, &[3.0, 1.0, 2.0]).unwrap()), 1.0);
        assert_eq!(c_of(&fit_constant(MeanKind::Max, &[3.0, 1.0, 2.0]).unwrap()), 3.0);
        assert_eq!(c_of(&fit_constant(MeanKind::Median, &[1.0, 2.0, 3.0, 4.0]).unwrap()), 2.5);
        assert_eq!(c_of(&fit_constant(MeanKind::Median, &[5.0, 1.0, 3.0]).unwrap()), 3.0);
    }

    #[test]
    fn constant_rejects_empty_and_non_constant_kinds() {
        assert!(fit_constant(MeanKind::Arithmetic, &[]).is_err());
        assert!(fit_constant(MeanKind::Linear, &[1.0]).is_err());
    }

    #[test]
    fn constant_kind_is_position_independent() {
        let mut rng = substream(3, "test", &[]);
        let x: Vec<Vec<f64>> = (0..12).map(|_| vec![rng.random(), rng.random()]).collect();
        let f: Vec<f64> = x.iter().map(|p| p[0] * 3.0 - p[1]).collect();
        let data = Dataset::new(x, f).unwrap();
        for kind in [MeanKind::Arithmetic, MeanKind::Median, MeanKind::Min, MeanKind::Max] {
            let m = fit_mean(&MeanSpec::new(kind), &data).unwrap();
            let v0 = m.evaluate(&[0.5, 0.5]);
            for _ in 0..100 {
                let x = [rng.random::<f64>(), rng.random::<f64>()];
                assert_eq!(m.evaluate(&x), v0);
            }
        }
    }

    #[test]
    fn max_constant_evaluates_everywhere() {
        let m = fit_constant(MeanKind::Max, &[1.0, 3.0, 2.0]).unwrap();
        assert_eq!(m.evaluate(&[0.1, 0.9]), 3.0);
        assert_eq!(m.evaluate(&[-4.0, 17.0]), 3.0);
    }

    #[test]
    fn linear_evaluation() {
        let m = FittedMean::Polynomial {
            kind: MeanKind::Linear,
            weights: vec![1.0, 2.0],
            lambda: 0.0,
        };
        assert_eq!(m.evaluate(&[0.5]), 2.0);
    }

    #[test]
    fn arithmetic_on_standardised_targets_is_zero() {
        let mut rng = substream(5, "test", &[]);
        let x: Vec<Vec<f64>> = (0..9).map(|_| vec![rng.random()]).collect();
        let raw: Vec<f64> = x.iter().map(|p| (7.0 * p[0]).sin() * 4.0 + 2.0).collect();
        let (std, _) = crate::engine::standardise(&raw);
        let data = Dataset::new(x, std).unwrap();
        let m = fit_mean(&MeanSpec::new(MeanKind::Arithmetic), &data).unwrap();
        assert!(m.evaluate(&[0.3]).abs() < 1e-12);
    }

    #[test]
    fn quadratic_reproduces_parabola() {
        // Targets are exactly (x - 0.5)^2, so the quadratic basis can represent
        // them; the direct oracle is the coefficient vector (0.25, -1, 1).
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 / 9.0]).collect();
        let f: Vec<f64> = x.iter().map(|p| (p[0] - 0.5).powi(2)).collect();
        let data = Dataset::new(x.clone(), f.clone()).unwrap();
        let m = fit_mean(&MeanSpec::new(MeanKind::Quadratic), &data).unwrap();
        let oracle = |v: f64| 0.25 - v + v * v;
        for (p, fi) in x.iter().zip(&f) {
            assert!((m.evaluate(p) - fi).abs() <= 1e-3);
            assert!((oracle(p[0]) - fi).abs() < 1e-14);
        }
    }

    #[test]
    fn rbf_uses_training_locations_and_positive_lambda() {
        let mut rng = substream(11, "test", &[]);
        let x: Vec<Vec<f64>> = (0..8).map(|_| vec![rng.random(), rng.random()]).collect();
        let f: Vec<f64> = x.iter().map(|p| p[0].sin() + p[1]).collect();
        let data = Dataset::new(x.clone(), f).unwrap();
        match fit_mean(&MeanSpec::new(MeanKind::Rbf), &data).unwrap() {
            FittedMean::Rbf { centres, lambda, .. } => {
                assert_eq!(centres, x);
                assert!(lambda >= 1e-6);
            }
            _ => panic!("expected RBF"),
        }
    }

    #[test]
    fn rbf_does_not_interpolate() {
        for seed in 0..5 {
            let mut rng = substream(seed, "rbf-guard", &[]);
            let t = 5 + seed as usize;
            let x: Vec<Vec<f64>> = (0..t).map(|_| vec![rng.random(), rng.random()]).collect();
            let f: Vec<f64> = (0..t).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let data = Dataset::new(x.clone(), f.clone()).unwrap();
            let mut spec = MeanSpec::new(MeanKind::Rbf);
            spec.cv.lambdas = vec![1e-6];
            let m = fit_mean(&spec, &data).unwrap();
            let max_resid = x
                .iter()
                .zip(&f)
                .map(|(p, fi)| (m.evaluate(p) - fi).abs())
                .fold(0.0, f64::max);
            assert!(max_resid > 0.0);
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for k in MeanKind::ALL {
            assert_eq!(k.name().parse::<MeanKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
        assert!("Mode".parse::<MeanKind>().is_err());
    }
}
