//! Projected quasi-Newton minimisation inside an axis-aligned box.
//!
//! A compact L-BFGS-B-style routine: variables pinned at a bound with the
//! gradient pointing outwards are frozen, the remaining ones follow a BFGS
//! direction, and every trial point is projected back into the box before
//! the Armijo test. Dimensions here are small (2 for kernel
//! hyperparameters, at most ~10 for acquisition refinement), so a dense
//! inverse-Hessian approximation is used.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OptimizeError {
    #[error("objective is not finite at the start point")]
    NonFiniteStart,
    #[error("bounds are inconsistent: {0}")]
    InvalidBounds(String),
}

#[derive(Debug, Clone, Copy)]
pub struct QuasiNewtonOptions {
    pub max_iter: usize,
    /// Convergence threshold on the infinity norm of the projected gradient.
    pub pgtol: f64,
    /// Relative reduction threshold between accepted iterates.
    pub ftol: f64,
    pub max_line_search: usize,
}

impl Default for QuasiNewtonOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            pgtol: 1e-6,
            ftol: 1e7 * f64::EPSILON,
            max_line_search: 40,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn project(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((xi, &lo), &hi) in x.iter_mut().zip(lower).zip(upper) {
        *xi = xi.clamp(lo, hi);
    }
}

fn projected_gradient(x: &[f64], g: &[f64], lower: &[f64], upper: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(g)
        .zip(lower.iter().zip(upper))
        .map(|((&xi, &gi), (&lo, &hi))| {
            if (xi <= lo && gi > 0.0) || (xi >= hi && gi < 0.0) {
                0.0
            } else {
                gi
            }
        })
        .collect()
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimises `objective` over the box `[lower, upper]` starting from `x0`.
///
/// The objective returns `None` for points where it cannot be evaluated;
/// the line search backtracks away from those.
pub fn minimize_box<F>(
    mut objective: F,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: &QuasiNewtonOptions,
) -> Result<Minimum, OptimizeError>
where
    F: FnMut(&[f64]) -> Option<(f64, Vec<f64>)>,
{
    let n = x0.len();
    if lower.len() != n || upper.len() != n {
        return Err(OptimizeError::InvalidBounds(format!(
            "dimension {n} vs bounds {}/{}",
            lower.len(),
            upper.len()
        )));
    }
    if lower.iter().zip(upper).any(|(lo, hi)| !(lo <= hi)) {
        return Err(OptimizeError::InvalidBounds("lower > upper".into()));
    }

    let mut x = x0.to_vec();
    project(&mut x, lower, upper);
    let (mut f, mut g) = match objective(&x) {
        Some((v, g)) if v.is_finite() && g.iter().all(|gi| gi.is_finite()) => (v, g),
        _ => return Err(OptimizeError::NonFiniteStart),
    };

    let mut h = identity(n);
    let mut h_is_identity = true;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        let pg = projected_gradient(&x, &g, lower, upper);
        if pg.iter().fold(0.0_f64, |m, v| m.max(v.abs())) < opts.pgtol {
            converged = true;
            break;
        }
        iterations += 1;

        let free: Vec<bool> = pg.iter().map(|&v| v != 0.0).collect();
        let mut p = vec![0.0; n];
        for i in 0..n {
            if free[i] {
                p[i] = -(0..n).filter(|&j| free[j]).map(|j| h[i * n + j] * g[j]).sum::<f64>();
            }
        }
        if !(dot(&p, &g) < 0.0) {
            p = pg.iter().map(|v| -v).collect();
            h = identity(n);
            h_is_identity = true;
        }

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..opts.max_line_search {
            let mut xn: Vec<f64> = x.iter().zip(&p).map(|(xi, pi)| xi + alpha * pi).collect();
            project(&mut xn, lower, upper);
            let step: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
            if step.iter().all(|s| *s == 0.0) {
                break;
            }
            if let Some((fv, gv)) = objective(&xn) {
                if fv.is_finite()
                    && gv.iter().all(|v| v.is_finite())
                    && fv <= f + 1e-4 * dot(&g, &step)
                {
                    accepted = Some((xn, fv, gv, step));
                    break;
                }
            }
            alpha *= 0.5;
        }

        let Some((xn, fn_, gn, s)) = accepted else {
            if h_is_identity {
                converged = true;
                break;
            }
            h = identity(n);
            h_is_identity = true;
            continue;
        };

        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-10 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if h_is_identity {
                // Shanno-Phua scaling of the first approximation.
                let scale = sy / dot(&y, &y);
                h.iter_mut().for_each(|v| *v *= scale);
            }
            let hy: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| h[i * n + j] * y[j]).sum())
                .collect();
            let yhy = dot(&y, &hy);
            let rho = 1.0 / sy;
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
                }
            }
            h_is_identity = false;
        }

        let decrease = f - fn_;
        x = xn;
        f = fn_;
        g = gn;
        if decrease <= opts.ftol * f.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }

    Ok(Minimum {
        x,
        value: f,
        iterations,
        converged,
    })
}

/// Central-difference gradient, falling back to one-sided differences at the
/// box edges.
pub fn finite_difference_gradient<F>(
    mut f: F,
    x: &[f64],
    lower: &[f64],
    upper: &[f64],
    step: f64,
) -> Option<Vec<f64>>
where
    F: FnMut(&[f64]) -> Option<f64>,
{
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    let mut centre: Option<f64> = None;
    for i in 0..x.len() {
        let hi = (x[i] + step).min(upper[i]);
        let lo = (x[i] - step).max(lower[i]);
        if hi == lo {
            grad.push(0.0);
            continue;
        }
        let mut value_at = |coord: f64, probe: &mut Vec<f64>| -> Option<f64> {
            if coord == x[i] {
                if centre.is_none() {
                    centre = Some(f(x)?);
                }
                centre
            } else {
                probe[i] = coord;
                let v = f(probe);
                probe[i] = x[i];
                v
            }
        };
        let fh = value_at(hi, &mut probe)?;
        let fl = value_at(lo, &mut probe)?;
        grad.push((fh - fl) / (hi - lo));
    }
    Some(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> Option<(f64, Vec<f64>)> {
        let (a, b) = (x[0], x[1]);
        let v = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = vec![
            -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
            200.0 * (b - a * a),
        ];
        Some((v, g))
    }

    #[test]
    fn unconstrained_rosenbrock() {
        let m = minimize_box(
            rosenbrock,
            &[-1.2, 1.0],
            &[-5.0, -5.0],
            &[5.0, 5.0],
            &QuasiNewtonOptions { max_iter: 500, pgtol: 1e-8, ftol: 0.0, ..Default::default() },
        )
        .unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-4, "{:?}", m);
        assert!((m.x[1] - 1.0).abs() < 1e-4, "{:?}", m);
    }

    #[test]
    fn active_bound_is_respected() {
        // Minimum of (x-3)^2 + (y+1)^2 on [0,1]^2 is at (1, 0).
        let f = |x: &[f64]| {
            Some((
                (x[0] - 3.0).powi(2) + (x[1] + 1.0).powi(2),
                vec![2.0 * (x[0] - 3.0), 2.0 * (x[1] + 1.0)],
            ))
        };
        let m = minimize_box(f, &[0.5, 0.5], &[0.0, 0.0], &[1.0, 1.0], &Default::default()).unwrap();
        assert_eq!(m.x, vec![1.0, 0.0]);
        assert!(m.converged);
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64]| Some((x[0].sin() * x[1].cos(), vec![x[0].cos() * x[1].cos(), -x[0].sin() * x[1].sin()]));
        let start = [0.3, 0.2];
        let f0 = f(&start).unwrap().0;
        let m = minimize_box(f, &start, &[-2.0, -2.0], &[2.0, 2.0], &Default::default()).unwrap();
        assert!(m.value <= f0);
    }

    #[test]
    fn non_finite_start_is_an_error() {
        let f = |_: &[f64]| None;
        let err = minimize_box(f, &[0.0], &[-1.0], &[1.0], &Default::default()).unwrap_err();
        assert_eq!(err, OptimizeError::NonFiniteStart);
    }

    #[test]
    fn finite_difference_matches_analytic() {
        let f = |x: &[f64]| Some(x[0] * x[0] + 3.0 * x[1]);
        let g = finite_difference_gradient(f, &[0.5, 0.0], &[0.0, 0.0], &[1.0, 1.0], 1e-6).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-6);
        assert!((g[1] - 3.0).abs() < 1e-6);
    }
}
