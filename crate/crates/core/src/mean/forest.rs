//! Extra-Trees regression with per-tree bootstrap resampling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::MeanError;
use crate::gp::Dataset;
use crate::rng::{substream, StreamRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Random (feature, threshold) candidates per node; `None` means one per
    /// input dimension.
    pub k_candidate_cuts: Option<usize>,
    pub min_samples_leaf: usize,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            k_candidate_cuts: None,
            min_samples_leaf: 2,
            bootstrap: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf(v) => return *v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExtraTrees {
    trees: Vec<Tree>,
    params: ForestParams,
}

impl ExtraTrees {
    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    /// Average of the per-tree leaf means.
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
    }
}

/// Training rows used by tree `tree`: `t` draws with replacement.
pub fn bootstrap_indices(seed: u64, tree: usize, t: usize) -> Vec<usize> {
    let mut rng = substream(seed, "forest-bootstrap", &[tree as u64]);
    (0..t).map(|_| rng.random_range(0..t)).collect()
}

fn sse(values: impl Iterator<Item = f64>) -> (f64, usize) {
    let (mut n, mut mean, mut m2) = (0usize, 0.0, 0.0);
    for v in values {
        n += 1;
        let delta = v - mean;
        mean += delta / n as f64;
        m2 += delta * (v - mean);
    }
    (m2, n)
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    f: &'a [f64],
    k: usize,
    min_leaf: usize,
    rng: StreamRng,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn leaf_value(&self, idx: &[usize]) -> f64 {
        idx.iter().map(|&i| self.f[i]).sum::<f64>() / idx.len() as f64
    }

    fn build(&mut self, idx: Vec<usize>) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(self.leaf_value(&idx)));

        let first = self.f[idx[0]];
        if idx.len() < 2 * self.min_leaf || idx.iter().all(|&i| self.f[i] == first) {
            return id;
        }

        let d = self.x[0].len();
        let ranges: Vec<(usize, f64, f64)> = (0..d)
            .filter_map(|j| {
                let (lo, hi) = idx.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                    (lo.min(self.x[i][j]), hi.max(self.x[i][j]))
                });
                (hi > lo).then_some((j, lo, hi))
            })
            .collect();
        if ranges.is_empty() {
            return id;
        }

        let mut best: Option<(f64, usize, f64)> = None;
        for _ in 0..self.k {
            let (feature, lo, hi) = ranges[self.rng.random_range(0..ranges.len())];
            let threshold = lo + self.rng.random::<f64>() * (hi - lo);
            if threshold >= hi {
                continue;
            }
            let (sl, nl) = sse(idx.iter().filter(|&&i| self.x[i][feature] <= threshold).map(|&i| self.f[i]));
            let (sr, nr) = sse(idx.iter().filter(|&&i| self.x[i][feature] > threshold).map(|&i| self.f[i]));
            if nl < self.min_leaf || nr < self.min_leaf {
                continue;
            }
            let score = sl + sr;
            if best.map_or(true, |(b, _, _)| score < b) {
                best = Some((score, feature, threshold));
            }
        }
        let Some((_, feature, threshold)) = best else {
            return id;
        };

        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
            idx.into_iter().partition(|&i| self.x[i][feature] <= threshold);
        let left = self.build(left_idx);
        let right = self.build(right_idx);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

/// Trains the ensemble. Tree `i` draws its bootstrap sample and its random
/// cuts from substreams keyed by `i`, so trees are independent of each other.
pub fn extra_trees_fit(params: &ForestParams, data: &Dataset) -> Result<ExtraTrees, MeanError> {
    if params.n_trees == 0 || params.min_samples_leaf == 0 || params.k_candidate_cuts == Some(0) {
        return Err(MeanError::InvalidArgument(
            "forest parameters must be positive".into(),
        ));
    }
    let t = data.len();
    let k = params.k_candidate_cuts.unwrap_or(data.dim()).max(1);
    let trees = (0..params.n_trees)
        .map(|i| {
            let idx = if params.bootstrap {
                bootstrap_indices(params.seed, i, t)
            } else {
                (0..t).collect()
            };
            let mut b = Builder {
                x: data.x(),
                f: data.f(),
                k,
                min_leaf: params.min_samples_leaf,
                rng: substream(params.seed, "forest-cuts", &[i as u64]),
                nodes: Vec::new(),
            };
            b.build(idx);
            Tree { nodes: b.nodes }
        })
        .collect();
    Ok(ExtraTrees {
        trees,
        params: params.clone(),
    })
}
