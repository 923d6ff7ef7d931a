//! K-fold cross-validation over the ridge penalty (and the RBF width).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::basis::{design_matrix, rbf_matrix};
use super::{MeanError, MeanKind, MeanSpec};
use crate::gp::Dataset;
use crate::rng::substream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvGrid {
    pub lambdas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub folds: usize,
    pub seed: u64,
}

impl Default for CvGrid {
    /// lambda in {1e-6, ..., 1e2}, gamma in {1e-3, 1e-2.5, ..., 1e2}, 5 folds.
    fn default() -> Self {
        Self {
            lambdas: (-6..=2).map(|k| 10f64.powi(k)).collect(),
            gammas: (-6..=4).map(|k| 10f64.powf(f64::from(k) / 2.0)).collect(),
            folds: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvSelection {
    pub lambda: f64,
    pub gamma: Option<f64>,
    /// Mean held-out squared error of the selection; NaN when CV was skipped.
    pub cv_error: f64,
}

/// Held-out index sets. Uses `folds` shuffled folds of near-equal size, or
/// leave-one-out when there are fewer points than folds.
pub fn fold_assignment(t: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let k = folds.min(t).max(1);
    let mut perm: Vec<usize> = (0..t).collect();
    perm.shuffle(&mut substream(seed, "cv-folds", &[]));
    let mut out = vec![Vec::new(); k];
    for (pos, &i) in perm.iter().enumerate() {
        out[pos % k].push(i);
    }
    for fold in &mut out {
        fold.sort_unstable();
    }
    out
}

/// Ridge solutions for a whole lambda path from one eigendecomposition of
/// the normal matrix.
struct RidgePath {
    eig: SymmetricEigen<f64, nalgebra::Dyn>,
    projected: DVector<f64>,
}

impl RidgePath {
    fn new(h: &DMatrix<f64>, f: &DVector<f64>) -> Self {
        let eig = h.tr_mul(h).symmetric_eigen();
        let projected = eig.eigenvectors.tr_mul(&h.tr_mul(f));
        Self { eig, projected }
    }

    fn weights(&self, lambda: f64) -> Option<DVector<f64>> {
        let mut scaled = self.projected.clone();
        for (v, s) in scaled.iter_mut().zip(self.eig.eigenvalues.iter()) {
            let denom = s.max(0.0) + lambda;
            if denom <= 0.0 {
                return None;
            }
            *v /= denom;
        }
        Some(&self.eig.eigenvectors * scaled)
    }
}

struct FoldData {
    h_train: DMatrix<f64>,
    h_test: DMatrix<f64>,
    f_train: DVector<f64>,
    f_test: DVector<f64>,
}

fn rows(h: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), h.ncols(), |i, j| h[(idx[i], j)])
}

fn complement(t: usize, held: &[usize]) -> Vec<usize> {
    (0..t).filter(|i| held.binary_search(i).is_err()).collect()
}

fn fold_data(spec: &MeanSpec, data: &Dataset, folds: &[Vec<usize>], gamma: Option<f64>) -> Result<Vec<FoldData>, MeanError> {
    let t = data.len();
    let f = data.f();
    let poly = match spec.kind {
        MeanKind::Linear | MeanKind::Quadratic => Some(design_matrix(spec.kind, data.x())?),
        _ => None,
    };
    Ok(folds
        .iter()
        .map(|held| {
            let train = complement(t, held);
            let (h_train, h_test) = match (&poly, gamma) {
                (Some(h), _) => (rows(h, &train), rows(h, held)),
                (None, Some(g)) => {
                    let centres: Vec<Vec<f64>> = train.iter().map(|&i| data.x()[i].clone()).collect();
                    let xt: Vec<Vec<f64>> = held.iter().map(|&i| data.x()[i].clone()).collect();
                    (
                        rbf_matrix(&centres, &centres, g, spec.rbf_distance),
                        rbf_matrix(&xt, &centres, g, spec.rbf_distance),
                    )
                }
                (None, None) => unreachable!("RBF folds need a gamma"),
            };
            FoldData {
                h_train,
                h_test,
                f_train: DVector::from_iterator(train.len(), train.iter().map(|&i| f[i])),
                f_test: DVector::from_iterator(held.len(), held.iter().map(|&i| f[i])),
            }
        })
        .collect())
}

/// Chooses the ridge penalty (and RBF width) minimising the mean held-out
/// squared error. Candidates are scanned from the largest lambda down and,
/// within a lambda, from the smallest gamma up; only strict improvements
/// replace the incumbent, so ties favour smoother models.
pub fn cross_validate(spec: &MeanSpec, data: &Dataset) -> Result<CvSelection, MeanError> {
    let grid = &spec.cv;
    let is_rbf = match spec.kind {
        MeanKind::Linear | MeanKind::Quadratic => false,
        MeanKind::Rbf => true,
        other => {
            return Err(MeanError::InvalidArgument(format!(
                "{other} has no cross-validated parameters"
            )))
        }
    };
    if grid.lambdas.is_empty() || (is_rbf && grid.gammas.is_empty()) {
        return Err(MeanError::InvalidArgument("empty CV grid".into()));
    }
    if grid.lambdas.iter().chain(&grid.gammas).any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(MeanError::InvalidArgument("CV grid values must be finite and >= 0".into()));
    }

    let mut lambdas = grid.lambdas.clone();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let mut gammas: Vec<Option<f64>> = if is_rbf {
        let mut g = grid.gammas.clone();
        g.sort_by(f64::total_cmp);
        g.into_iter().map(Some).collect()
    } else {
        vec![None]
    };

    let t = data.len();
    if t < 2 {
        return Ok(CvSelection {
            lambda: lambdas[0],
            gamma: gammas[0],
            cv_error: f64::NAN,
        });
    }
    if gammas.len() == 1 && lambdas.len() == 1 {
        return Ok(CvSelection {
            lambda: lambdas[0],
            gamma: gammas.remove(0),
            cv_error: f64::NAN,
        });
    }

    let folds = fold_assignment(t, grid.folds.max(2), grid.seed);
    // errors[gamma][lambda]
    let mut errors = vec![vec![0.0; lambdas.len()]; gammas.len()];
    for (gi, gamma) in gammas.iter().enumerate() {
        for fd in fold_data(spec, data, &folds, *gamma)? {
            let path = RidgePath::new(&fd.h_train, &fd.f_train);
            for (li, &lambda) in lambdas.iter().enumerate() {
                let sse = match path.weights(lambda) {
                    Some(w) => (&fd.h_test * w - &fd.f_test).norm_squared(),
                    None => f64::INFINITY,
                };
                errors[gi][li] += sse;
            }
        }
    }

    let mut best: Option<CvSelection> = None;
    for (li, &lambda) in lambdas.iter().enumerate() {
        for (gi, gamma) in gammas.iter().enumerate() {
            let err = errors[gi][li] / t as f64;
            if !err.is_finite() {
                continue;
            }
            let better = match &best {
                None => true,
                Some(b) => err < b.cv_error - 1e-12 * b.cv_error.abs(),
            };
            if better {
                best = Some(CvSelection {
                    lambda,
                    gamma: *gamma,
                    cv_error: err,
                });
            }
        }
    }
    best.ok_or(MeanError::SingularSystem { lambda: lambdas[lambdas.len() - 1] })
}
