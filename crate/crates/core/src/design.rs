//! Space-filling designs: maximin Latin hypercubes and shifted Halton points.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gp::euclidean;
use crate::rng::substream;

/// Random LHS candidates compared under the maximin criterion by default.
pub const DEFAULT_LHS_CANDIDATES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhsDesign {
    pub points: Vec<Vec<f64>>,
    pub seed: u64,
    pub n_candidates: usize,
}

impl LhsDesign {
    pub fn min_distance(&self) -> f64 {
        min_pairwise_distance(&self.points)
    }
}

/// Smallest pairwise Euclidean distance (infinite for fewer than two points).
pub fn min_pairwise_distance(points: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in 0..i {
            best = best.min(euclidean(&points[i], &points[j]));
        }
    }
    best
}

/// One random Latin hypercube of `m` points: each column is a random
/// permutation of the bins with a uniform offset inside each bin.
fn random_lhs(m: usize, d: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let mut points = vec![vec![0.0; d]; m];
    let width = 1.0 / m as f64;
    let mut perm: Vec<usize> = (0..m).collect();
    for j in 0..d {
        perm.shuffle(rng);
        for (i, &bin) in perm.iter().enumerate() {
            let upper = (bin + 1) as f64 / m as f64;
            let mut v = (bin as f64 + rng.random::<f64>()) * width;
            if v >= upper {
                v = upper.next_down();
            }
            points[i][j] = v;
        }
    }
    points
}

/// The random LHS candidate with the largest minimum pairwise distance; ties
/// keep the earliest candidate.
pub fn latin_hypercube(m: usize, d: usize, seed: u64, n_candidates: usize) -> LhsDesign {
    assert!(m >= 1 && d >= 1, "LHS needs at least one point and one dimension");
    let n_candidates = n_candidates.max(1);
    let mut rng = substream(seed, "lhs", &[]);
    let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
    for _ in 0..n_candidates {
        let cand = random_lhs(m, d, &mut rng);
        let score = min_pairwise_distance(&cand);
        if best.as_ref().map_or(true, |(b, _)| score > *b) {
            best = Some((score, cand));
        }
    }
    LhsDesign {
        points: best.map(|(_, p)| p).unwrap_or_default(),
        seed,
        n_candidates,
    }
}

const PRIMES: [u32; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131,
];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = u64::from(base);
    let inv = 1.0 / f64::from(base);
    let (mut value, mut scale) = (0.0, inv);
    while i > 0 {
        value += (i % b) as f64 * scale;
        i /= b;
        scale *= inv;
    }
    value
}

/// `n` Halton points in `[0,1)^d` with a seeded random shift modulo one
/// (Cranley-Patterson rotation). Dimensions beyond the prime table fall
/// back to plain uniform draws.
pub fn shifted_halton(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = substream(seed, "halton", &[]);
    let shift: Vec<f64> = (0..d).map(|_| rng.random()).collect();
    (1..=n as u64)
        .map(|i| {
            (0..d)
                .map(|j| match PRIMES.get(j) {
                    Some(&p) => {
                        let v = radical_inverse(i, p) + shift[j];
                        if v >= 1.0 {
                            v - 1.0
                        } else {
                            v
                        }
                    }
                    None => rng.random(),
                })
                .collect()
        })
        .collect()
}
