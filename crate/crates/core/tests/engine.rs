use gpbo::acquisition::{AcquisitionKind, AcquisitionSpec};
use gpbo::benchmarks::BenchmarkProblem;
use gpbo::engine::{grid_cells, run_bo, run_grid, GridSpec, RunConfig, RunRecord};
use gpbo::mean::{MeanKind, MeanSpec};

fn config(problem: &str, kind: MeanKind, acq: AcquisitionKind, budget: usize, seed: u64) -> RunConfig {
    let mut c = RunConfig::new(problem, MeanSpec::new(kind), AcquisitionSpec::new(acq), seed).unwrap();
    c.budget = budget;
    c
}

fn check_record(rec: &RunRecord) {
    let p = BenchmarkProblem::by_name(&rec.config().problem).unwrap();
    assert!(rec.is_complete(), "{:?}", rec.footer.error);
    assert_eq!(rec.iterations.len(), rec.config().budget);
    let mut prev = f64::INFINITY;
    for it in &rec.iterations {
        assert!(it.best_so_far <= prev);
        prev = it.best_so_far;
        assert_eq!(it.regret, (p.f_star() - it.best_so_far).abs());
        assert_eq!(p.evaluate(&it.x_unit).unwrap(), it.f);
        if it.t > rec.config().initial_samples {
            let st = it.standardisation.unwrap();
            let f_best_raw = rec.iterations[..it.t - 1]
                .iter()
                .map(|o| o.f)
                .fold(f64::INFINITY, f64::min);
            assert!((it.f_best_std.unwrap() - st.apply(f_best_raw)).abs() < 1e-12);
            assert!(it.theta.is_some() && it.mean.is_some());
        }
    }
}

#[test]
fn convex_toy_converges() {
    // The toy's minimum 0 at x = 0.3 agrees with a dense grid search.
    let p = BenchmarkProblem::by_name("Toy1dConvex").unwrap();
    let grid_min = (0..=100_000)
        .map(|i| p.evaluate(&[i as f64 / 100_000.0]).unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!((grid_min - p.f_star()).abs() < 1e-9);
    for seed in 0..10 {
        let rec = run_bo(&config("Toy1dConvex", MeanKind::Arithmetic, AcquisitionKind::ExpectedImprovement, 25, seed))
            .unwrap();
        check_record(&rec);
        assert!(rec.terminal_regret().unwrap() < 1e-2, "seed {seed}: {:?}", rec.terminal_regret());
    }
}

#[test]
fn every_mean_kind_runs_on_a_2d_problem() {
    for kind in MeanKind::ALL {
        for acq in [AcquisitionKind::ExpectedImprovement, AcquisitionKind::UpperConfidenceBound] {
            let rec = run_bo(&config("Branin", kind, acq, 9, 13)).unwrap();
            check_record(&rec);
            let last = rec.iterations.last().unwrap();
            match kind {
                MeanKind::Linear | MeanKind::Quadratic => assert!(last.lambda.is_some() && last.gamma.is_none()),
                MeanKind::Rbf => assert!(last.lambda.is_some() && last.gamma.is_some()),
                _ => assert!(last.lambda.is_none()),
            }
        }
    }
}

#[test]
fn repeated_runs_are_identical() {
    let c = config("SixHumpCamel", MeanKind::RandomForest, AcquisitionKind::UpperConfidenceBound, 10, 77);
    assert_eq!(run_bo(&c).unwrap().to_jsonl(), run_bo(&c).unwrap().to_jsonl());
}

#[test]
fn grid_shapes_and_pairing() {
    let mut grid = GridSpec::new(
        vec!["Branin".into(), "Toy1dSmooth".into()],
        vec![MeanSpec::new(MeanKind::Median), MeanSpec::new(MeanKind::Quadratic)],
        vec![AcquisitionSpec::new(AcquisitionKind::ExpectedImprovement)],
        3,
        5,
    );
    let cells = grid_cells(&grid).unwrap();
    assert_eq!(cells.len(), 12);
    assert!(cells.iter().filter(|c| c.problem == "Branin").all(|c| c.config.initial_samples == 4
        && c.config.budget == 200));
    grid.budget = 6;
    let out = run_grid(&grid).unwrap();
    for (cell, rec) in &out {
        let rec = rec.as_ref().unwrap();
        check_record(rec);
        for (other, orec) in &out {
            if other.problem == cell.problem && other.repeat == cell.repeat {
                let m = rec.config().initial_samples;
                assert_eq!(rec.iterations[..m], orec.as_ref().unwrap().iterations[..m]);
            }
        }
    }
    let seeds: std::collections::BTreeSet<u64> = out.iter().map(|(c, _)| c.config.seed).collect();
    assert_eq!(seeds.len(), 6);
}
