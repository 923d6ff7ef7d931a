//! GP posterior and likelihood against a dense direct solve that never
//! touches a Cholesky factor.

use std::sync::Arc;

use gpbo::gp::{
    build_posterior, log_marginal_likelihood, matern52, ConstantMean, Dataset, KernelHyperparams,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Dense {
    mu: f64,
    sigma2: f64,
    mll: f64,
}

fn dense_oracle(data: &Dataset, m: f64, h: &KernelHyperparams, eps: f64, q: &[f64]) -> Dense {
    let t = data.len();
    let x = data.x();
    let k = DMatrix::from_fn(t, t, |i, j| {
        matern52(&x[i], &x[j], h).unwrap() + if i == j { eps } else { 0.0 }
    });
    let inv = k.clone().try_inverse().unwrap();
    let r = DVector::from_iterator(t, data.f().iter().map(|f| f - m));
    let ks = DVector::from_iterator(t, x.iter().map(|xi| matern52(q, xi, h).unwrap()));
    let mu = m + (ks.transpose() * &inv * &r)[0];
    let sigma2 = h.theta0 - (ks.transpose() * &inv * &ks)[0];
    let det = k.lu().determinant();
    let mll = -0.5 * det.ln() - 0.5 * (r.transpose() * &inv * &r)[0];
    Dense { mu, sigma2, mll }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn posterior_and_likelihood_match_dense_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let d = rng.random_range(1..=3);
        let t = rng.random_range(1..=12);
        let x: Vec<Vec<f64>> = (0..t).map(|_| (0..d).map(|_| rng.random::<f64>()).collect()).collect();
        let f: Vec<f64> = (0..t).map(|_| rng.random_range(-2.0..2.0)).collect();
        let data = Dataset::new(x, f).unwrap();
        let h = KernelHyperparams::new(10f64.powf(rng.random_range(-1.0..1.0)), 10f64.powf(rng.random_range(-0.5..1.0)))
            .unwrap();
        let m = rng.random_range(-1.0..1.0);
        // A moderate nugget keeps the dense inverse well conditioned.
        let eps = 1e-3 * h.theta0;
        let gp = build_posterior(data.clone(), Arc::new(ConstantMean(m)), h, eps).unwrap();
        let q: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let oracle = dense_oracle(&data, m, &h, eps, &q);
        let p = gp.predict(&q).unwrap();
        assert!(rel(p.mu, oracle.mu) < 1e-8, "mu {} vs {}", p.mu, oracle.mu);
        assert!((p.sigma2 - oracle.sigma2).abs() < 1e-8 * h.theta0, "var {} vs {}", p.sigma2, oracle.sigma2);
        let mll = log_marginal_likelihood(&data, &ConstantMean(m), &h, eps).unwrap();
        assert!(rel(mll, oracle.mll) < 1e-8, "mll {mll} vs {}", oracle.mll);
    }
}

#[test]
fn kernel_matrices_are_positive_semidefinite() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..30 {
        let d = rng.random_range(1..=4);
        let t = rng.random_range(2..=15);
        let x: Vec<Vec<f64>> = (0..t).map(|_| (0..d).map(|_| rng.random::<f64>()).collect()).collect();
        let h = KernelHyperparams::new(rng.random_range(0.1..5.0), rng.random_range(0.1..20.0)).unwrap();
        let k = DMatrix::from_fn(t, t, |i, j| matern52(&x[i], &x[j], &h).unwrap());
        let eig = k.symmetric_eigen();
        assert!(eig.eigenvalues.iter().all(|&l| l > -1e-10 * h.theta0));
    }
}

#[test]
fn tiny_nugget_interpolates_data() {
    let x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 / 8.0, ((i * 3) % 8) as f64 / 8.0]).collect();
    let f: Vec<f64> = x.iter().map(|p| (4.0 * p[0]).cos() - p[1]).collect();
    let data = Dataset::new(x.clone(), f.clone()).unwrap();
    let h = KernelHyperparams::new(1.0, 3.0).unwrap();
    let gp = build_posterior(data, Arc::new(ConstantMean(0.5)), h, 1e-10).unwrap();
    for (xi, fi) in x.iter().zip(&f) {
        let p = gp.predict(xi).unwrap();
        assert!((p.mu - fi).abs() < 1e-6);
        assert!(p.sigma2 < 1e-6);
    }
}
