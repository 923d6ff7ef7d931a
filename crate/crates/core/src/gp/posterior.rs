use std::fmt;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::kernel::{euclidean, matern52_at};
use super::{Dataset, GpError, KernelHyperparams, PriorMean};

/// Initial diagonal jitter, relative to `theta0`.
pub const RELATIVE_JITTER: f64 = 1e-6;
/// Largest jitter tried before giving up, relative to `theta0`.
pub const MAX_RELATIVE_JITTER: f64 = 1e-2;

pub fn default_nugget(hyper: &KernelHyperparams) -> f64 {
    RELATIVE_JITTER * hyper.theta0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub mu: f64,
    pub sigma2: f64,
}

impl Prediction {
    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

fn kernel_matrix(data: &Dataset, hyper: &KernelHyperparams) -> DMatrix<f64> {
    let t = data.len();
    let x = data.x();
    let mut k = DMatrix::zeros(t, t);
    for i in 0..t {
        k[(i, i)] = hyper.theta0;
        for j in 0..i {
            let v = matern52_at(hyper.theta0, hyper.theta1 * euclidean(&x[i], &x[j]));
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// Cholesky factor of `K + nugget I`, escalating the nugget tenfold (starting
/// from at least the default relative jitter) until the factorisation succeeds
/// or the jitter ceiling is exceeded.
fn factorise(
    k: &DMatrix<f64>,
    theta0: f64,
    nugget: f64,
) -> Result<(Cholesky<f64, Dyn>, f64), GpError> {
    let ceiling = MAX_RELATIVE_JITTER * theta0;
    let mut eps = nugget;
    loop {
        let mut a = k.clone();
        for i in 0..a.nrows() {
            a[(i, i)] += eps;
        }
        if let Some(chol) = a.cholesky() {
            return Ok((chol, eps));
        }
        let next = if eps < RELATIVE_JITTER * theta0 {
            RELATIVE_JITTER * theta0
        } else {
            eps * 10.0
        };
        if next > ceiling * (1.0 + 1e-12) {
            return Err(GpError::SingularKernel { nugget: eps });
        }
        log::debug!("cholesky failed with jitter {eps:e}, retrying with {next:e}");
        eps = next;
    }
}

fn mean_vector(data: &Dataset, mean: &dyn PriorMean) -> DVector<f64> {
    DVector::from_iterator(data.len(), data.x().iter().map(|x| mean.value(x)))
}

fn check_nugget(nugget: f64) -> Result<(), GpError> {
    if !(nugget.is_finite() && nugget >= 0.0) {
        return Err(GpError::InvalidArgument(format!("nugget must be >= 0, got {nugget}")));
    }
    Ok(())
}

/// A fitted GP: cached Cholesky factor and weights for fast prediction.
#[derive(Clone)]
pub struct GpPosterior {
    data: Dataset,
    hyper: KernelHyperparams,
    mean: Arc<dyn PriorMean>,
    /// Row-major lower-triangular factor of `K + nugget I`.
    chol: Vec<f64>,
    alpha: Vec<f64>,
    nugget: f64,
}

impl fmt::Debug for GpPosterior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GpPosterior")
            .field("t", &self.data.len())
            .field("hyper", &self.hyper)
            .field("nugget", &self.nugget)
            .finish()
    }
}

pub fn build_posterior(
    data: Dataset,
    mean: Arc<dyn PriorMean>,
    hyper: KernelHyperparams,
    nugget: f64,
) -> Result<GpPosterior, GpError> {
    check_nugget(nugget)?;
    KernelHyperparams::new(hyper.theta0, hyper.theta1)?;
    let k = kernel_matrix(&data, &hyper);
    let (chol, nugget) = factorise(&k, hyper.theta0, nugget)?;
    let l = chol.l();
    let resid = DVector::from_column_slice(data.f()) - mean_vector(&data, mean.as_ref());
    let alpha = l
        .solve_lower_triangular(&resid)
        .and_then(|z| l.transpose().solve_upper_triangular(&z))
        .ok_or(GpError::SingularKernel { nugget })?;
    let t = data.len();
    let mut chol = vec![0.0; t * t];
    for i in 0..t {
        for j in 0..=i {
            chol[i * t + j] = l[(i, j)];
        }
    }
    Ok(GpPosterior {
        data,
        hyper,
        mean,
        chol,
        alpha: alpha.iter().copied().collect(),
        nugget,
    })
}

impl GpPosterior {
    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn hyper(&self) -> &KernelHyperparams {
        &self.hyper
    }

    /// Jitter actually used after any escalation.
    pub fn nugget(&self) -> f64 {
        self.nugget
    }

    pub fn mean(&self) -> &dyn PriorMean {
        self.mean.as_ref()
    }

    /// Lower Cholesky factor as a dense matrix.
    pub fn cholesky_factor(&self) -> DMatrix<f64> {
        let t = self.data.len();
        DMatrix::from_fn(t, t, |i, j| if j <= i { self.chol[i * t + j] } else { 0.0 })
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction, GpError> {
        if x.len() != self.data.dim() {
            return Err(GpError::InvalidArgument(format!(
                "query has dimension {}, model has {}",
                x.len(),
                self.data.dim()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(GpError::InvalidArgument("non-finite query".into()));
        }
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> Prediction {
        let t = self.data.len();
        let KernelHyperparams { theta0, theta1 } = self.hyper;
        let mut v: Vec<f64> = self
            .data
            .x()
            .iter()
            .map(|xi| matern52_at(theta0, theta1 * euclidean(x, xi)))
            .collect();
        let mu = self.mean.value(x) + v.iter().zip(&self.alpha).map(|(a, b)| a * b).sum::<f64>();
        // Forward substitution: v <- L^{-1} k.
        for i in 0..t {
            let row = &self.chol[i * t..i * t + i];
            let s: f64 = row.iter().zip(&v[..i]).map(|(a, b)| a * b).sum();
            v[i] = (v[i] - s) / self.chol[i * t + i];
        }
        let reduction: f64 = v.iter().map(|a| a * a).sum();
        Prediction {
            mu,
            sigma2: (theta0 - reduction).max(0.0),
        }
    }
}

/// Log marginal likelihood up to an additive constant.
pub fn log_marginal_likelihood(
    data: &Dataset,
    mean: &dyn PriorMean,
    hyper: &KernelHyperparams,
    nugget: f64,
) -> Result<f64, GpError> {
    check_nugget(nugget)?;
    KernelHyperparams::new(hyper.theta0, hyper.theta1)?;
    let m = mean_vector(data, mean);
    let k = kernel_matrix(data, hyper);
    let (chol, _) = factorise(&k, hyper.theta0, nugget)?;
    let l = chol.l();
    let resid = DVector::from_column_slice(data.f()) - m;
    let z = l
        .solve_lower_triangular(&resid)
        .ok_or(GpError::SingularKernel { nugget })?;
    let log_det = 2.0 * l.diagonal().iter().map(|v| v.ln()).sum::<f64>();
    Ok(-0.5 * log_det - 0.5 * z.norm_squared())
}

/// Log marginal likelihood with jitter `relative_jitter * theta0`, and its
/// gradient with respect to `(ln theta0, ln theta1)`.
///
/// Because the jitter scales with `theta0`, the whole matrix is proportional
/// to `theta0` and its log-derivative in that direction is the matrix itself.
/// `mean_at_data` holds m(x_i) for the training locations.
pub fn log_marginal_likelihood_with_gradient(
    data: &Dataset,
    mean_at_data: &[f64],
    hyper: &KernelHyperparams,
    relative_jitter: f64,
) -> Result<(f64, [f64; 2]), GpError> {
    let t = data.len();
    let k = kernel_matrix(data, hyper);
    let (chol, _) = factorise(&k, hyper.theta0, relative_jitter * hyper.theta0)?;
    let l = chol.l_dirty();
    let resid = DVector::from_iterator(t, data.f().iter().zip(mean_at_data).map(|(f, m)| f - m));
    let alpha = chol.solve(&resid);
    let log_det = 2.0 * l.diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let quad = resid.dot(&alpha);
    let value = -0.5 * log_det - 0.5 * quad;

    // d/d ln theta0: the matrix itself (jitter included).
    let g0 = 0.5 * quad - 0.5 * t as f64;

    // d/d ln theta1: r dk/dr = -theta0 (5/3) r^2 (1 + sqrt5 r) exp(-sqrt5 r).
    let inv = chol.inverse();
    let x = data.x();
    let mut g1 = 0.0;
    for i in 0..t {
        for j in 0..i {
            let r = hyper.theta1 * euclidean(&x[i], &x[j]);
            let s = 5f64.sqrt() * r;
            let dk = -hyper.theta0 * (5.0 / 3.0) * r * r * (1.0 + s) * (-s).exp();
            // Symmetric off-diagonal pair counted twice.
            g1 += (alpha[i] * alpha[j] - inv[(i, j)]) * dk;
        }
    }
    Ok((value, [g0, g1]))
}
