//! Expected improvement and upper confidence bound, in the minimisation form,
//! plus their multistart maximisation over the unit cube.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design::shifted_halton;
use crate::gp::GpPosterior;
use crate::optimize::{finite_difference_gradient, minimize_box, QuasiNewtonOptions};
use crate::rng::derive_seed;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AcquisitionError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AcquisitionKind {
    #[serde(rename = "EI")]
    ExpectedImprovement,
    #[serde(rename = "UCB")]
    UpperConfidenceBound,
}

impl AcquisitionKind {
    pub fn name(self) -> &'static str {
        match self {
            AcquisitionKind::ExpectedImprovement => "EI",
            AcquisitionKind::UpperConfidenceBound => "UCB",
        }
    }
}

impl fmt::Display for AcquisitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AcquisitionKind {
    type Err = AcquisitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "EI" => Ok(AcquisitionKind::ExpectedImprovement),
            "UCB" => Ok(AcquisitionKind::UpperConfidenceBound),
            _ => Err(AcquisitionError::InvalidArgument(format!(
                "unknown acquisition function '{s}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultistartParams {
    /// Raw quasi-random candidates; `None` means `1000 d`, capped at 5000.
    pub n_raw: Option<usize>,
    /// Best raw candidates refined by local ascent.
    pub n_local: usize,
    pub seed: u64,
}

impl Default for MultistartParams {
    fn default() -> Self {
        Self {
            n_raw: None,
            n_local: 10,
            seed: 0,
        }
    }
}

impl MultistartParams {
    pub fn raw_count(&self, d: usize) -> usize {
        self.n_raw.unwrap_or((1000 * d).min(5000)).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionSpec {
    pub kind: AcquisitionKind,
    #[serde(default = "default_delta")]
    pub ucb_delta: f64,
    #[serde(default)]
    pub multistart: MultistartParams,
}

fn default_delta() -> f64 {
    0.1
}

impl AcquisitionSpec {
    pub fn new(kind: AcquisitionKind) -> Self {
        Self {
            kind,
            ucb_delta: default_delta(),
            multistart: MultistartParams::default(),
        }
    }
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function through the complementary error
/// function, accurate in both tails.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Expected improvement below `f_best` of a N(mu, sigma^2) prediction.
/// With `sigma == 0` the limit `max(f_best - mu, 0)` is returned.
pub fn expected_improvement(mu: f64, sigma: f64, f_best: f64) -> Result<f64, AcquisitionError> {
    if !(mu.is_finite() && sigma.is_finite() && f_best.is_finite()) {
        return Err(AcquisitionError::InvalidArgument("non-finite EI input".into()));
    }
    if sigma < 0.0 {
        return Err(AcquisitionError::InvalidArgument(format!("negative sigma {sigma}")));
    }
    Ok(ei_unchecked(mu, sigma, f_best))
}

#[inline]
fn ei_unchecked(mu: f64, sigma: f64, f_best: f64) -> f64 {
    let gap = f_best - mu;
    if sigma <= 0.0 {
        return gap.max(0.0);
    }
    let s = gap / sigma;
    if !s.is_finite() {
        return gap.max(0.0);
    }
    (sigma * (s * normal_cdf(s) + normal_pdf(s))).max(0.0)
}

/// `-(mu - sqrt(beta) sigma)`: larger is better for minimisation.
pub fn upper_confidence_bound(mu: f64, sigma: f64, beta: f64) -> f64 {
    -(mu - beta.sqrt() * sigma)
}

/// `beta_t = 2 ln(d t^2 pi^2 / (6 delta))`.
pub fn beta_schedule(t: usize, d: usize, delta: f64) -> f64 {
    let t = t.max(1) as f64;
    2.0 * (d as f64 * t * t * PI * PI / (6.0 * delta)).ln()
}

/// Acquisition value at `x`; `beta` is only used by UCB.
pub fn acquisition_value(gp: &GpPosterior, kind: AcquisitionKind, f_best: f64, beta: f64, x: &[f64]) -> f64 {
    let p = gp.predict_unchecked(x);
    let sigma = p.sigma2.sqrt();
    let v = match kind {
        AcquisitionKind::ExpectedImprovement => ei_unchecked(p.mu, sigma, f_best),
        AcquisitionKind::UpperConfidenceBound => upper_confidence_bound(p.mu, sigma, beta),
    };
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    pub x: Vec<f64>,
    pub value: f64,
    /// Whether a local refinement beat the raw candidates.
    pub refined: bool,
}

/// Maximises the acquisition over `[0,1]^d`: scores shifted-Halton raw
/// candidates, refines the best `n_local` with bounded quasi-Newton ascent and
/// returns the overall best point. `t` is the number of observations so far
/// and drives the UCB schedule.
pub fn maximise_acquisition(
    gp: &GpPosterior,
    spec: &AcquisitionSpec,
    f_best: f64,
    t: usize,
    seed: u64,
) -> Result<Proposal, AcquisitionError> {
    if !(spec.ucb_delta > 0.0 && spec.ucb_delta < 1.0) {
        return Err(AcquisitionError::InvalidArgument(format!(
            "ucb_delta must lie in (0, 1), got {}",
            spec.ucb_delta
        )));
    }
    if !f_best.is_finite() {
        return Err(AcquisitionError::InvalidArgument("non-finite incumbent".into()));
    }
    let d = gp.data().dim();
    let n_raw = spec.multistart.raw_count(d);
    let n_local = spec.multistart.n_local.clamp(1, n_raw);
    let beta = beta_schedule(t, d, spec.ucb_delta);
    let kind = spec.kind;
    let acq = |x: &[f64]| acquisition_value(gp, kind, f_best, beta, x);

    let raw = shifted_halton(n_raw, d, derive_seed(seed, "acq-candidates", &[spec.multistart.seed]));
    let values: Vec<f64> = raw.par_iter().map(|x| acq(x)).collect();

    let mut order: Vec<usize> = (0..n_raw).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut best = Proposal {
        x: raw[order[0]].clone(),
        value: values[order[0]],
        refined: false,
    };

    let lower = vec![0.0; d];
    let upper = vec![1.0; d];
    let opts = QuasiNewtonOptions {
        max_iter: 100,
        pgtol: 1e-12,
        ..Default::default()
    };
    let refined: Vec<Option<(Vec<f64>, f64)>> = order[..n_local]
        .par_iter()
        .map(|&i| {
            let objective = |x: &[f64]| {
                let v = acq(x);
                if !v.is_finite() {
                    return None;
                }
                let g = finite_difference_gradient(
                    |p: &[f64]| Some(-acq(p)).filter(|v| v.is_finite()),
                    x,
                    &lower,
                    &upper,
                    1e-7,
                )?;
                Some((-v, g))
            };
            minimize_box(objective, &raw[i], &lower, &upper, &opts)
                .ok()
                .map(|m| (m.x, -m.value))
        })
        .collect();
    for (x, v) in refined.into_iter().flatten() {
        if v > best.value {
            best = Proposal {
                x,
                value: v,
                refined: true,
            };
        }
    }
    Ok(best)
}
