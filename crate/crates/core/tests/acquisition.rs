use std::sync::Arc;

use gpbo::acquisition::{
    acquisition_value, beta_schedule, expected_improvement, maximise_acquisition, AcquisitionKind,
    AcquisitionSpec,
};
use gpbo::engine::standardise;
use gpbo::gp::{build_posterior, ConstantMean, Dataset, GpPosterior, KernelHyperparams};
use gpbo::mean::{fit_constant, MeanKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn one_d_posterior(mean: f64, shift: f64) -> GpPosterior {
    let x = vec![vec![0.1], vec![0.35], vec![0.5], vec![0.8]];
    let f = vec![0.4 + shift, -0.9 + shift, -0.3 + shift, 1.1 + shift];
    let data = Dataset::new(x, f).unwrap();
    let h = KernelHyperparams::new(1.0, 6.0).unwrap();
    build_posterior(data, Arc::new(ConstantMean(mean)), h, 1e-6).unwrap()
}

#[test]
fn ei_agrees_with_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let n = 1_000_000;
    for _ in 0..20 {
        let mu = rng.random_range(-2.0..2.0);
        let sigma = rng.random_range(0.05..2.0);
        let f_best = rng.random_range(-2.0..2.0);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let z: f64 = StandardNormal.sample(&mut rng);
            let v = (f_best - (mu + sigma * z)).max(0.0);
            s += v;
            s2 += v * v;
        }
        let mean = s / n as f64;
        let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
        let ei = expected_improvement(mu, sigma, f_best).unwrap();
        assert!((ei - mean).abs() <= 3.0 * se + 1e-12, "{ei} vs {mean} +- {se}");
    }
}

#[test]
fn beta_range() {
    for d in 2..=10 {
        for t in 2 * d..=200 {
            let b = beta_schedule(t, d, 0.1).sqrt();
            assert!((3.0..=6.0).contains(&b), "d={d} t={t}: {b}");
        }
    }
}

#[test]
fn maximiser_matches_dense_grid() {
    for kind in [AcquisitionKind::ExpectedImprovement, AcquisitionKind::UpperConfidenceBound] {
        let gp = one_d_posterior(0.0, 0.0);
        let spec = AcquisitionSpec::new(kind);
        let f_best = -0.9;
        let t = 4;
        let beta = beta_schedule(t, 1, spec.ucb_delta);
        let grid_n = 200_001;
        let (mut bx, mut bv) = (0.0, f64::NEG_INFINITY);
        for i in 0..grid_n {
            let x = i as f64 / (grid_n - 1) as f64;
            let v = acquisition_value(&gp, kind, f_best, beta, &[x]);
            if v > bv {
                bv = v;
                bx = x;
            }
        }
        let p = maximise_acquisition(&gp, &spec, f_best, t, 3).unwrap();
        assert!((p.x[0] - bx).abs() < 1e-3, "{kind}: {} vs grid {bx}", p.x[0]);
        assert!(p.value >= bv - 1e-9);
    }
}

#[test]
fn maximiser_is_deterministic_and_in_cube() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x: Vec<Vec<f64>> = (0..12).map(|_| (0..3).map(|_| rng.random::<f64>()).collect()).collect();
    let f: Vec<f64> = x.iter().map(|p| p.iter().map(|v| (v - 0.4).powi(2)).sum()).collect();
    let (f, _) = standardise(&f);
    let f_best = f.iter().copied().fold(f64::INFINITY, f64::min);
    let data = Dataset::new(x, f).unwrap();
    let h = KernelHyperparams::new(1.0, 3.0).unwrap();
    let gp = build_posterior(data, Arc::new(ConstantMean(0.0)), h, 1e-6).unwrap();
    let spec = AcquisitionSpec::new(AcquisitionKind::ExpectedImprovement);
    let a = maximise_acquisition(&gp, &spec, f_best, 12, 5).unwrap();
    let b = maximise_acquisition(&gp, &spec, f_best, 12, 5).unwrap();
    assert_eq!(a, b);
    assert!(a.x.iter().all(|v| (0.0..=1.0).contains(v)));
}

#[test]
fn ucb_argmax_invariant_to_shift() {
    let spec = AcquisitionSpec::new(AcquisitionKind::UpperConfidenceBound);
    let a = maximise_acquisition(&one_d_posterior(0.2, 0.0), &spec, -0.9, 4, 8).unwrap();
    let b = maximise_acquisition(&one_d_posterior(5.2, 5.0), &spec, 4.1, 4, 8).unwrap();
    assert!((a.x[0] - b.x[0]).abs() < 1e-6, "{} vs {}", a.x[0], b.x[0]);
    assert!((a.value - (b.value + 5.0)).abs() < 1e-8);
}

/// Distance from the EI maximiser to the nearest training input for a prior
/// mean fixed at the given constant.
fn ei_exploration_distance(kind: MeanKind) -> f64 {
    let x: Vec<Vec<f64>> = [0.05, 0.2, 0.3, 0.45, 0.6].iter().map(|v| vec![*v]).collect();
    let raw: Vec<f64> = x.iter().map(|p| (6.0 * p[0]).sin() + 0.5 * p[0]).collect();
    let (f, _) = standardise(&raw);
    let f_best = f.iter().copied().fold(f64::INFINITY, f64::min);
    let c = match fit_constant(kind, &f).unwrap() {
        gpbo::mean::FittedMean::Constant { c, .. } => c,
        _ => unreachable!(),
    };
    let data = Dataset::new(x.clone(), f).unwrap();
    let h = KernelHyperparams::new(1.0, 8.0).unwrap();
    let gp = build_posterior(data, Arc::new(ConstantMean(c)), h, 1e-6).unwrap();
    let spec = AcquisitionSpec::new(AcquisitionKind::ExpectedImprovement);
    let p = maximise_acquisition(&gp, &spec, f_best, 5, 0).unwrap();
    x.iter().map(|xi| (xi[0] - p.x[0]).abs()).fold(f64::INFINITY, f64::min)
}

#[test]
fn low_prior_mean_explores_high_prior_mean_exploits() {
    let min = ei_exploration_distance(MeanKind::Min);
    let arith = ei_exploration_distance(MeanKind::Arithmetic);
    let max = ei_exploration_distance(MeanKind::Max);
    assert!(min > arith && arith >= max, "min {min}, arithmetic {arith}, max {max}");
}
