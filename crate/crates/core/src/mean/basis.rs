use nalgebra::{DMatrix, DVector};

use super::{MeanError, MeanKind, RbfDistance};
use crate::gp::euclidean;

/// Monomials of total degree <= `degree` (1 or 2): the constant, the linear
/// terms, then squares and cross terms `x_i x_j` (i <= j) in lexicographic
/// order.
pub fn polynomial_features(x: &[f64], degree: usize) -> Vec<f64> {
    let d = x.len();
    let mut h = Vec::with_capacity(1 + d + if degree >= 2 { d * (d + 1) / 2 } else { 0 });
    h.push(1.0);
    h.extend_from_slice(x);
    if degree >= 2 {
        for i in 0..d {
            for j in i..d {
                h.push(x[i] * x[j]);
            }
        }
    }
    h
}

/// Design matrix H for the linear or quadratic basis, one row per point.
pub fn design_matrix(kind: MeanKind, x: &[Vec<f64>]) -> Result<DMatrix<f64>, MeanError> {
    let degree = match kind {
        MeanKind::Linear => 1,
        MeanKind::Quadratic => 2,
        other => {
            return Err(MeanError::InvalidArgument(format!(
                "{other} has no polynomial design matrix"
            )))
        }
    };
    let rows: Vec<Vec<f64>> = x.iter().map(|p| polynomial_features(p, degree)).collect();
    let q = rows.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(rows.len(), q, |i, j| rows[i][j]))
}

#[inline]
pub(super) fn rbf_value(x: &[f64], z: &[f64], gamma: f64, distance: RbfDistance) -> f64 {
    let r = euclidean(x, z);
    match distance {
        RbfDistance::Euclidean => (-gamma * r).exp(),
        RbfDistance::SquaredEuclidean => (-gamma * r * r).exp(),
    }
}

/// RBF activations `exp(-gamma |x - z_i|)` for every centre.
pub fn rbf_features(x: &[f64], centres: &[Vec<f64>], gamma: f64) -> Vec<f64> {
    centres
        .iter()
        .map(|z| rbf_value(x, z, gamma, RbfDistance::Euclidean))
        .collect()
}

pub(super) fn rbf_matrix(
    x: &[Vec<f64>],
    centres: &[Vec<f64>],
    gamma: f64,
    distance: RbfDistance,
) -> DMatrix<f64> {
    DMatrix::from_fn(x.len(), centres.len(), |i, j| {
        rbf_value(&x[i], &centres[j], gamma, distance)
    })
}

/// Ridge solution `(H^T H + lambda I)^{-1} H^T f` via a Cholesky factorisation
/// of the regularised normal equations. Every weight, the intercept included,
/// is penalised.
pub fn ridge_fit(h: &DMatrix<f64>, f: &[f64], lambda: f64) -> Result<Vec<f64>, MeanError> {
    if h.nrows() != f.len() {
        return Err(MeanError::InvalidArgument(format!(
            "design has {} rows but {} targets",
            h.nrows(),
            f.len()
        )));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(MeanError::InvalidArgument(format!("lambda must be >= 0, got {lambda}")));
    }
    let q = h.ncols();
    let mut a = h.tr_mul(h);
    for i in 0..q {
        a[(i, i)] += lambda;
    }
    let b = h.tr_mul(&DVector::from_column_slice(f));
    let w = match a.clone().cholesky() {
        Some(chol) => chol.solve(&b),
        None if lambda > 0.0 => a.lu().solve(&b).ok_or(MeanError::SingularSystem { lambda })?,
        None => return Err(MeanError::SingularSystem { lambda }),
    };
    if w.iter().any(|v| !v.is_finite()) {
        return Err(MeanError::SingularSystem { lambda });
    }
    Ok(w.iter().copied().collect())
}
