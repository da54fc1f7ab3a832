//! Random forest: bagged Gini trees with per-node feature subsampling.

use serde::{Deserialize, Serialize};

use crate::ml::tree::{ClassificationTree, TreeParams};
use crate::rng::{derive_seed, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<ClassificationTree>,
    /// Seeds the per-tree bootstrap and feature draws were derived from.
    pub tree_seeds: Vec<u64>,
}

impl RandomForest {
    pub fn fit(
        xs: &[&[f64]],
        ys: &[bool],
        n_trees: usize,
        max_depth: usize,
        min_leaf: usize,
        seed: u64,
    ) -> Self {
        let n = xs.len();
        let d = xs[0].len();
        let feature_sample = ((d as f64).sqrt().floor() as usize).max(1);
        let mut trees = Vec::with_capacity(n_trees);
        let mut tree_seeds = Vec::with_capacity(n_trees);
        for t in 0..n_trees {
            let tree_seed = derive_seed(seed, t as u64);
            let mut rng = Rng::new(tree_seed);
            let indices: Vec<usize> = (0..n).map(|_| rng.next_below(n)).collect();
            let tree = ClassificationTree::fit(
                xs,
                ys,
                &indices,
                &TreeParams {
                    max_depth,
                    min_leaf,
                    feature_sample: Some(feature_sample),
                },
                Some(&mut rng),
            );
            trees.push(tree);
            tree_seeds.push(tree_seed);
        }
        RandomForest { trees, tree_seeds }
    }

    /// Mean of the per-tree leaf probabilities.
    pub fn prob(&self, x: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.prob(x)).sum();
        sum / self.trees.len() as f64
    }
}
