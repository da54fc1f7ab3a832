//! Gradient boosting with logistic loss on depth-limited regression
//! trees. Leaves carry Newton steps; scores accumulate from an initial
//! log-odds value.

use serde::{Deserialize, Serialize};

use crate::ml::linear::sigmoid;
use crate::ml::tree::{RegressionTree, TreeParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedTrees {
    pub initial_score: f64,
    pub learning_rate: f64,
    pub trees: Vec<RegressionTree>,
    /// Mean logistic loss after each boosting round, first entry is the
    /// loss of the initial constant model.
    pub losses: Vec<f64>,
}

fn mean_log_loss(scores: &[f64], ys: &[bool]) -> f64 {
    let n = scores.len() as f64;
    scores
        .iter()
        .zip(ys)
        .map(|(&z, &y)| {
            let t = if y { 1.0 } else { 0.0 };
            z.max(0.0) - z * t + (-z.abs()).exp().ln_1p()
        })
        .sum::<f64>()
        / n
}

impl BoostedTrees {
    pub fn fit(xs: &[&[f64]], ys: &[bool], rounds: usize, depth: usize, rate: f64) -> Self {
        let n = xs.len();
        let pos = ys.iter().filter(|&&y| y).count() as f64;
        let p = (pos / n as f64).clamp(1e-6, 1.0 - 1e-6);
        let initial_score = (p / (1.0 - p)).ln();
        let mut scores = vec![initial_score; n];
        let mut losses = vec![mean_log_loss(&scores, ys)];
        let mut trees = Vec::with_capacity(rounds);
        let indices: Vec<usize> = (0..n).collect();
        for _ in 0..rounds {
            let mut grads = Vec::with_capacity(n);
            let mut hessians = Vec::with_capacity(n);
            for (&z, &y) in scores.iter().zip(ys) {
                let prob = sigmoid(z);
                grads.push(if y { 1.0 } else { 0.0 } - prob);
                hessians.push((prob * (1.0 - prob)).max(1e-9));
            }
            let tree = RegressionTree::fit(
                xs,
                &grads,
                &hessians,
                &indices,
                &TreeParams {
                    max_depth: depth,
                    min_leaf: 1,
                    feature_sample: None,
                },
            );
            for (z, x) in scores.iter_mut().zip(xs) {
                *z += rate * tree.value(x);
            }
            losses.push(mean_log_loss(&scores, ys));
            trees.push(tree);
        }
        BoostedTrees {
            initial_score,
            learning_rate: rate,
            trees,
            losses,
        }
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        self.initial_score
            + self.learning_rate * self.trees.iter().map(|t| t.value(x)).sum::<f64>()
    }

    pub fn prob(&self, x: &[f64]) -> f64 {
        sigmoid(self.score(x))
    }
}
