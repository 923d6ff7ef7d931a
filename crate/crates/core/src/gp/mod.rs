//! Gaussian-process regression with an isotropic Matérn 5/2 kernel.

mod fit;
mod kernel;
mod posterior;

pub use fit::{fit_hyperparameters, restart_points, HyperparamBox, HyperparamFit, GP_RESTARTS};
pub use kernel::{matern52, KernelHyperparams};
pub use posterior::{
    build_posterior, default_nugget, log_marginal_likelihood, log_marginal_likelihood_with_gradient,
    GpPosterior, Prediction, MAX_RELATIVE_JITTER, RELATIVE_JITTER,
};

pub(crate) use kernel::euclidean;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GpError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("kernel matrix is not positive definite after jitter {nugget:e}")]
    SingularKernel { nugget: f64 },
}

/// A prior mean function m(x) evaluated pointwise.
pub trait PriorMean: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
}

/// Constant prior mean, mostly useful for tests and illustrations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantMean(pub f64);

impl PriorMean for ConstantMean {
    fn value(&self, _x: &[f64]) -> f64 {
        self.0
    }
}

/// Paired design locations and observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Vec<Vec<f64>>,
    f: Vec<f64>,
}

impl Dataset {
    pub fn new(x: Vec<Vec<f64>>, f: Vec<f64>) -> Result<Self, GpError> {
        if x.is_empty() {
            return Err(GpError::InvalidArgument("dataset needs at least one point".into()));
        }
        if x.len() != f.len() {
            return Err(GpError::InvalidArgument(format!(
                "{} locations but {} observations",
                x.len(),
                f.len()
            )));
        }
        let d = x[0].len();
        if d == 0 {
            return Err(GpError::InvalidArgument("dimension must be at least 1".into()));
        }
        if x.iter().any(|row| row.len() != d) {
            return Err(GpError::InvalidArgument("ragged design matrix".into()));
        }
        if x.iter().flatten().chain(f.iter()).any(|v| !v.is_finite()) {
            return Err(GpError::InvalidArgument("non-finite entry in dataset".into()));
        }
        Ok(Self { x, f })
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x[0].len()
    }

    pub fn x(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    /// Same locations, different targets.
    pub fn with_targets(&self, f: Vec<f64>) -> Result<Self, GpError> {
        Self::new(self.x.clone(), f)
    }

    /// Sub-dataset made of the rows in `idx`.
    pub fn subset(&self, idx: &[usize]) -> Result<Self, GpError> {
        Self::new(
            idx.iter().map(|&i| self.x[i].clone()).collect(),
            idx.iter().map(|&i| self.f[i]).collect(),
        )
    }
}
