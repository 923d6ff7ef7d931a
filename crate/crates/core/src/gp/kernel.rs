use serde::{Deserialize, Serialize};

use super::GpError;

const SQRT5: f64 = 2.236_067_977_499_79;

/// Output amplitude `theta0` and inverse length-scale `theta1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelHyperparams {
    pub theta0: f64,
    pub theta1: f64,
}

impl KernelHyperparams {
    pub fn new(theta0: f64, theta1: f64) -> Result<Self, GpError> {
        if !(theta0.is_finite() && theta0 > 0.0 && theta1.is_finite() && theta1 > 0.0) {
            return Err(GpError::InvalidArgument(format!(
                "hyperparameters must be finite and positive, got ({theta0}, {theta1})"
            )));
        }
        Ok(Self { theta0, theta1 })
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Kernel value as a function of the scaled distance `r = theta1 * |x - x'|`.
#[inline]
pub(crate) fn matern52_at(theta0: f64, r: f64) -> f64 {
    let s = SQRT5 * r;
    theta0 * (1.0 + s + s * s / 3.0) * (-s).exp()
}

/// Isotropic Matérn 5/2 covariance between two points.
pub fn matern52(x: &[f64], xp: &[f64], hyper: &KernelHyperparams) -> Result<f64, GpError> {
    if x.len() != xp.len() {
        return Err(GpError::InvalidArgument("points differ in dimension".into()));
    }
    if x.iter().chain(xp).any(|v| !v.is_finite())
        || !hyper.theta0.is_finite()
        || !hyper.theta1.is_finite()
    {
        return Err(GpError::InvalidArgument("non-finite kernel input".into()));
    }
    Ok(matern52_at(hyper.theta0, hyper.theta1 * euclidean(x, xp)))
}
