//! Multi-restart maximisation of the log marginal likelihood.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::posterior::{log_marginal_likelihood_with_gradient, RELATIVE_JITTER};
use super::{Dataset, KernelHyperparams, PriorMean};
use crate::optimize::{minimize_box, QuasiNewtonOptions};
use crate::rng::substream;

pub const GP_RESTARTS: usize = 10;

/// Search box for the kernel hyperparameters, in natural-log coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperparamBox {
    pub log_theta0: (f64, f64),
    pub log_theta1: (f64, f64),
}

impl HyperparamBox {
    /// theta0 in [1e-4, 1e3], theta1 in [10^-1.5 / sqrt(d), 10^2].
    pub fn for_dim(d: usize) -> Self {
        let ln10 = std::f64::consts::LN_10;
        Self {
            log_theta0: (-4.0 * ln10, 3.0 * ln10),
            log_theta1: (-1.5 * ln10 - 0.5 * (d as f64).ln(), 2.0 * ln10),
        }
    }

    pub fn lower(&self) -> [f64; 2] {
        [self.log_theta0.0, self.log_theta1.0]
    }

    pub fn upper(&self) -> [f64; 2] {
        [self.log_theta0.1, self.log_theta1.1]
    }

    pub fn midpoint(&self) -> KernelHyperparams {
        KernelHyperparams {
            theta0: (0.5 * (self.log_theta0.0 + self.log_theta0.1)).exp(),
            theta1: (0.5 * (self.log_theta1.0 + self.log_theta1.1)).exp(),
        }
    }

    pub fn contains(&self, h: &KernelHyperparams) -> bool {
        let (a, b) = (h.theta0.ln(), h.theta1.ln());
        let tol = 1e-9;
        a >= self.log_theta0.0 - tol
            && a <= self.log_theta0.1 + tol
            && b >= self.log_theta1.0 - tol
            && b <= self.log_theta1.1 + tol
    }

    fn clamp_log(&self, p: [f64; 2]) -> [f64; 2] {
        [
            p[0].clamp(self.log_theta0.0, self.log_theta0.1),
            p[1].clamp(self.log_theta1.0, self.log_theta1.1),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperparamFit {
    pub hyper: KernelHyperparams,
    pub log_likelihood: f64,
    /// Set when every restart failed and the box midpoint was returned.
    pub fallback: bool,
}

/// Start points in log space: the incumbent (clamped into the box) first when
/// given, then log-uniform draws until `restarts` points are produced.
pub fn restart_points(
    bounds: &HyperparamBox,
    restarts: usize,
    seed: u64,
    incumbent: Option<&KernelHyperparams>,
) -> Vec<[f64; 2]> {
    let mut rng = substream(seed, "gp-restarts", &[]);
    let mut pts = Vec::with_capacity(restarts);
    if let Some(h) = incumbent {
        if h.theta0 > 0.0 && h.theta1 > 0.0 && restarts > 0 {
            pts.push(bounds.clamp_log([h.theta0.ln(), h.theta1.ln()]));
        }
    }
    while pts.len() < restarts {
        let a = rng.random_range(bounds.log_theta0.0..=bounds.log_theta0.1);
        let b = rng.random_range(bounds.log_theta1.0..=bounds.log_theta1.1);
        pts.push([a, b]);
    }
    pts
}

/// Maximises the marginal likelihood from `restarts` seeded start points and
/// returns the best optimum found.
pub fn fit_hyperparameters(
    data: &Dataset,
    mean: &dyn PriorMean,
    restarts: usize,
    seed: u64,
    incumbent: Option<&KernelHyperparams>,
) -> HyperparamFit {
    let bounds = HyperparamBox::for_dim(data.dim());
    let mean_at_data: Vec<f64> = data.x().iter().map(|x| mean.value(x)).collect();
    let objective = |p: &[f64]| {
        let h = KernelHyperparams {
            theta0: p[0].exp(),
            theta1: p[1].exp(),
        };
        log_marginal_likelihood_with_gradient(data, &mean_at_data, &h, RELATIVE_JITTER)
            .ok()
            .map(|(v, g)| (-v, vec![-g[0], -g[1]]))
    };
    let opts = QuasiNewtonOptions {
        max_iter: 100,
        pgtol: 1e-5,
        ..Default::default()
    };

    let mut best: Option<([f64; 2], f64)> = None;
    for start in restart_points(&bounds, restarts.max(1), seed, incumbent) {
        match minimize_box(objective, &start, &bounds.lower(), &bounds.upper(), &opts) {
            Ok(m) => {
                let ll = -m.value;
                if best.map_or(true, |(_, b)| ll > b) {
                    best = Some(([m.x[0], m.x[1]], ll));
                }
            }
            Err(e) => log::debug!("restart at {start:?} failed: {e}"),
        }
    }

    match best {
        Some((p, ll)) => HyperparamFit {
            hyper: KernelHyperparams {
                theta0: p[0].exp(),
                theta1: p[1].exp(),
            },
            log_likelihood: ll,
            fallback: false,
        },
        None => {
            log::warn!("all {restarts} hyperparameter restarts failed; using box midpoint");
            HyperparamFit {
                hyper: bounds.midpoint(),
                log_likelihood: f64::NEG_INFINITY,
                fallback: true,
            }
        }
    }
}
