//! Synthetic test objectives with native bounds, a unit-cube wrapper and
//! known global minima.

use std::f64::consts::{E, PI};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchmarkError {
    #[error("unknown problem '{0}'")]
    UnknownProblem(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("best observation {best} lies below the known minimum {f_star}")]
    BelowOptimum { best: f64, f_star: f64 },
}

/// Names of the ten comparison problems, in table order.
pub const PROBLEM_NAMES: [&str; 10] = [
    "Branin",
    "Eggholder",
    "GoldsteinPrice",
    "SixHumpCamel",
    "Shekel",
    "Ackley",
    "Hartmann6",
    "Michalewicz",
    "Rosenbrock",
    "StyblinskiTang",
];

/// One-dimensional problems used by tests and smoke runs.
pub const TOY_NAMES: [&str; 2] = ["Toy1dConvex", "Toy1dSmooth"];

/// Steepness exponent of the Michalewicz function.
pub const MICHALEWICZ_M: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct BenchmarkProblem {
    name: &'static str,
    bounds: Vec<(f64, f64)>,
    objective: fn(&[f64]) -> f64,
    f_star: f64,
    x_stars: Vec<Vec<f64>>,
}

impl BenchmarkProblem {
    pub fn by_name(name: &str) -> Result<Self, BenchmarkError> {
        let p = match name {
            "Branin" => Self {
                name: "Branin",
                bounds: vec![(-5.0, 10.0), (0.0, 15.0)],
                objective: branin,
                f_star: 5.0 / (4.0 * PI),
                x_stars: vec![vec![-PI, 12.275], vec![PI, 2.275], vec![3.0 * PI, 2.475]],
            },
            "Eggholder" => Self {
                name: "Eggholder",
                bounds: vec![(-512.0, 512.0); 2],
                objective: eggholder,
                f_star: -959.640_662_720_850_8,
                x_stars: vec![vec![512.0, 404.231_805_113_757_8]],
            },
            "GoldsteinPrice" => Self {
                name: "GoldsteinPrice",
                bounds: vec![(-2.0, 2.0); 2],
                objective: goldstein_price,
                f_star: 3.0,
                x_stars: vec![vec![0.0, -1.0]],
            },
            "SixHumpCamel" => Self {
                name: "SixHumpCamel",
                bounds: vec![(-3.0, 3.0), (-2.0, 2.0)],
                objective: six_hump_camel,
                f_star: -1.031_628_453_489_877_4,
                x_stars: vec![
                    vec![0.089_842_013_100_318_06, -0.712_656_403_020_739_6],
                    vec![-0.089_842_013_100_318_06, 0.712_656_403_020_739_6],
                ],
            },
            "Shekel" => {
                let a = 4.000_746_868_270_634;
                let b = 3.999_509_480_085_773_6;
                Self {
                    name: "Shekel",
                    bounds: vec![(0.0, 10.0); 4],
                    objective: shekel,
                    f_star: -10.536_443_153_483_528,
                    x_stars: vec![vec![a, b, a, b]],
                }
            }
            "Ackley" => Self {
                name: "Ackley",
                bounds: vec![(-32.768, 32.768); 5],
                objective: ackley,
                f_star: 0.0,
                x_stars: vec![vec![0.0; 5]],
            },
            "Hartmann6" => Self {
                name: "Hartmann6",
                bounds: vec![(0.0, 1.0); 6],
                objective: hartmann6,
                f_star: -3.322_368_011_415_514_8,
                x_stars: vec![vec![
                    0.201_689_511_006_705_42,
                    0.150_010_691_823_457_97,
                    0.476_873_974_221_897,
                    0.275_332_430_494_056_07,
                    0.311_651_616_600_113_24,
                    0.657_300_534_065_620_3,
                ]],
            },
            "Michalewicz" => Self {
                name: "Michalewicz",
                bounds: vec![(0.0, PI); 10],
                objective: michalewicz,
                f_star: -9.660_151_715_641_341,
                x_stars: vec![vec![
                    2.202_905_520_172_609_4,
                    1.570_796_326_794_896_8,
                    1.284_991_570_552_924_5,
                    1.923_058_469_866_362_9,
                    1.720_469_772_565_841_3,
                    1.570_796_326_794_896_7,
                    1.454_413_971_362_379,
                    1.756_086_520_945_026_4,
                    1.655_717_416_821_029_1,
                    1.570_796_326_794_896_7,
                ]],
            },
            "Rosenbrock" => Self {
                name: "Rosenbrock",
                bounds: vec![(-5.0, 10.0); 10],
                objective: rosenbrock,
                f_star: 0.0,
                x_stars: vec![vec![1.0; 10]],
            },
            "StyblinskiTang" => Self {
                name: "StyblinskiTang",
                bounds: vec![(-5.0, 5.0); 10],
                objective: styblinski_tang,
                f_star: -391.661_657_037_714_15,
                x_stars: vec![vec![-2.903_534_027_771_177; 10]],
            },
            "Toy1dConvex" => Self {
                name: "Toy1dConvex",
                bounds: vec![(0.0, 1.0)],
                objective: toy_convex,
                f_star: 0.0,
                x_stars: vec![vec![0.3]],
            },
            "Toy1dSmooth" => Self {
                name: "Toy1dSmooth",
                bounds: vec![(0.0, 1.0)],
                objective: toy_smooth,
                f_star: -1.0,
                x_stars: vec![vec![0.75]],
            },
            other => return Err(BenchmarkError::UnknownProblem(other.to_string())),
        };
        Ok(p)
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn native_bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn f_star(&self) -> f64 {
        self.f_star
    }

    /// Known minimisers in native coordinates.
    pub fn x_stars(&self) -> &[Vec<f64>] {
        &self.x_stars
    }

    /// The objective in native coordinates, without bound checks.
    pub fn evaluate_native(&self, x: &[f64]) -> Result<f64, BenchmarkError> {
        self.check_dim(x)?;
        Ok((self.objective)(x))
    }

    /// Evaluates at a point of the unit cube, mapped affinely onto the native box.
    pub fn evaluate(&self, x_unit: &[f64]) -> Result<f64, BenchmarkError> {
        self.check_dim(x_unit)?;
        if let Some(v) = x_unit.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(BenchmarkError::InvalidArgument(format!(
                "{}: coordinate {v} outside the unit cube",
                self.name
            )));
        }
        Ok((self.objective)(&self.to_native(x_unit)))
    }

    pub fn to_native(&self, x_unit: &[f64]) -> Vec<f64> {
        x_unit
            .iter()
            .zip(&self.bounds)
            .map(|(u, (lo, hi))| lo + u * (hi - lo))
            .collect()
    }

    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.bounds)
            .map(|(v, (lo, hi))| (v - lo) / (hi - lo))
            .collect()
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), BenchmarkError> {
        if x.len() != self.dim() {
            return Err(BenchmarkError::InvalidArgument(format!(
                "{} expects {} coordinates, got {}",
                self.name,
                self.dim(),
                x.len()
            )));
        }
        Ok(())
    }
}

/// Tolerance below the known minimum before a best value counts as corrupt.
pub const REGRET_SLACK: f64 = 1e-9;

/// `|f_star - best|`, rejecting bests that undercut the known minimum.
pub fn simple_regret(f_star: f64, best_so_far: f64) -> Result<f64, BenchmarkError> {
    if !best_so_far.is_finite() || best_so_far < f_star - REGRET_SLACK {
        return Err(BenchmarkError::BelowOptimum {
            best: best_so_far,
            f_star,
        });
    }
    Ok((f_star - best_so_far).abs())
}

fn branin(x: &[f64]) -> f64 {
    let b = 5.1 / (4.0 * PI * PI);
    let c = 5.0 / PI;
    let t = 1.0 / (8.0 * PI);
    let q = x[1] - b * x[0] * x[0] + c * x[0] - 6.0;
    q * q + 10.0 * (1.0 - t) * x[0].cos() + 10.0
}

fn eggholder(x: &[f64]) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    -(x2 + 47.0) * (x2 + x1 / 2.0 + 47.0).abs().sqrt().sin()
        - x1 * (x1 - (x2 + 47.0)).abs().sqrt().sin()
}

fn goldstein_price(x: &[f64]) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    let a = 1.0
        + (x1 + x2 + 1.0).powi(2)
            * (19.0 - 14.0 * x1 + 3.0 * x1 * x1 - 14.0 * x2 + 6.0 * x1 * x2 + 3.0 * x2 * x2);
    let b = 30.0
        + (2.0 * x1 - 3.0 * x2).powi(2)
            * (18.0 - 32.0 * x1 + 12.0 * x1 * x1 + 48.0 * x2 - 36.0 * x1 * x2 + 27.0 * x2 * x2);
    a * b
}

fn six_hump_camel(x: &[f64]) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    let x1s = x1 * x1;
    (4.0 - 2.1 * x1s + x1s * x1s / 3.0) * x1s + x1 * x2 + (-4.0 + 4.0 * x2 * x2) * x2 * x2
}

const SHEKEL_BETA: [f64; 10] = [1.0, 2.0, 2.0, 4.0, 4.0, 6.0, 3.0, 7.0, 5.0, 5.0];
const SHEKEL_C: [[f64; 10]; 4] = [
    [4.0, 1.0, 8.0, 6.0, 3.0, 2.0, 5.0, 8.0, 6.0, 7.0],
    [4.0, 1.0, 8.0, 6.0, 7.0, 9.0, 3.0, 1.0, 2.0, 3.6],
    [4.0, 1.0, 8.0, 6.0, 3.0, 2.0, 5.0, 8.0, 6.0, 7.0],
    [4.0, 1.0, 8.0, 6.0, 7.0, 9.0, 3.0, 1.0, 2.0, 3.6],
];

fn shekel(x: &[f64]) -> f64 {
    -(0..10)
        .map(|i| {
            let s: f64 = (0..4).map(|j| (x[j] - SHEKEL_C[j][i]).powi(2)).sum();
            1.0 / (s + 0.1 * SHEKEL_BETA[i])
        })
        .sum::<f64>()
}

fn ackley(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    let sq: f64 = x.iter().map(|v| v * v).sum();
    let cs: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum();
    -20.0 * (-0.2 * (sq / d).sqrt()).exp() - (cs / d).exp() + 20.0 + E
}

const HARTMANN_ALPHA: [f64; 4] = [1.0, 1.2, 3.0, 3.2];
const HARTMANN_A: [[f64; 6]; 4] = [
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];
const HARTMANN_P: [[f64; 6]; 4] = [
    [1312.0, 1696.0, 5569.0, 124.0, 8283.0, 5886.0],
    [2329.0, 4135.0, 8307.0, 3736.0, 1004.0, 9991.0],
    [2348.0, 1451.0, 3522.0, 2883.0, 3047.0, 6650.0],
    [4047.0, 8828.0, 8732.0, 5743.0, 1091.0, 381.0],
];

fn hartmann6(x: &[f64]) -> f64 {
    -(0..4)
        .map(|i| {
            let inner: f64 = (0..6)
                .map(|j| HARTMANN_A[i][j] * (x[j] - 1e-4 * HARTMANN_P[i][j]).powi(2))
                .sum();
            HARTMANN_ALPHA[i] * (-inner).exp()
        })
        .sum::<f64>()
}

fn michalewicz(x: &[f64]) -> f64 {
    -x.iter()
        .enumerate()
        .map(|(i, v)| v.sin() * ((i + 1) as f64 * v * v / PI).sin().powf(2.0 * MICHALEWICZ_M))
        .sum::<f64>()
}

fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (w[0] - 1.0).powi(2))
        .sum()
}

fn styblinski_tang(x: &[f64]) -> f64 {
    0.5 * x.iter().map(|v| v.powi(4) - 16.0 * v * v + 5.0 * v).sum::<f64>()
}

fn toy_convex(x: &[f64]) -> f64 {
    (x[0] - 0.3).powi(2)
}

fn toy_smooth(x: &[f64]) -> f64 {
    (2.0 * PI * x[0]).sin()
}
