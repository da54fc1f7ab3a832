//! CART-style trees: Gini classification trees (DT, RF base learner) and
//! squared-error regression trees with Newton leaf values (BT base
//! learner). Splits are deterministic; ties go to the first candidate in
//! feature-then-threshold order.

use serde::{Deserialize, Serialize};

use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf { value: f64 },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Number of features examined per node; `None` means all.
    pub feature_sample: Option<usize>,
}

/// Binary classification tree; leaves hold P(label = true).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationTree {
    pub nodes: Vec<Node>,
}

impl ClassificationTree {
    pub fn fit(
        xs: &[&[f64]],
        ys: &[bool],
        indices: &[usize],
        params: &TreeParams,
        rng: Option<&mut Rng>,
    ) -> Self {
        let mut builder = Builder {
            xs,
            targets: Targets::Classes(ys),
            params: *params,
            rng,
            nodes: Vec::new(),
        };
        builder.grow(indices, 0);
        ClassificationTree {
            nodes: builder.nodes,
        }
    }

    pub fn prob(&self, x: &[f64]) -> f64 {
        eval(&self.nodes, x)
    }

    pub fn depth(&self) -> usize {
        fn rec(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 1,
                Node::Split { left, right, .. } => 1 + rec(nodes, left).max(rec(nodes, right)),
            }
        }
        rec(&self.nodes, 0)
    }
}

/// Regression tree over gradient/hessian pairs; leaves hold the Newton
/// step sum(g)/sum(h), clamped to keep boosting stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
}

const LEAF_CLAMP: f64 = 4.0;

impl RegressionTree {
    pub fn fit(
        xs: &[&[f64]],
        grads: &[f64],
        hessians: &[f64],
        indices: &[usize],
        params: &TreeParams,
    ) -> Self {
        let mut builder = Builder {
            xs,
            targets: Targets::GradHess(grads, hessians),
            params: *params,
            rng: None,
            nodes: Vec::new(),
        };
        builder.grow(indices, 0);
        RegressionTree {
            nodes: builder.nodes,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        eval(&self.nodes, x)
    }
}

fn eval(nodes: &[Node], x: &[f64]) -> f64 {
    let mut i = 0;
    loop {
        match nodes[i] {
            Node::Leaf { value } => return value,
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                i = if x[feature] <= threshold { left } else { right };
            }
        }
    }
}

enum Targets<'a> {
    Classes(&'a [bool]),
    GradHess(&'a [f64], &'a [f64]),
}

struct Builder<'a, 'r> {
    xs: &'a [&'a [f64]],
    targets: Targets<'a>,
    params: TreeParams,
    rng: Option<&'r mut Rng>,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    score: f64,
}

impl<'a, 'r> Builder<'a, 'r> {
    fn leaf_value(&self, indices: &[usize]) -> f64 {
        match &self.targets {
            Targets::Classes(ys) => {
                let pos = indices.iter().filter(|&&i| ys[i]).count();
                pos as f64 / indices.len() as f64
            }
            Targets::GradHess(g, h) => {
                let sg: f64 = indices.iter().map(|&i| g[i]).sum();
                let sh: f64 = indices.iter().map(|&i| h[i]).sum();
                (sg / (sh + 1e-9)).clamp(-LEAF_CLAMP, LEAF_CLAMP)
            }
        }
    }

    /// Impurity-style score to minimize for a candidate child partition.
    fn partition_score(&self, left: &[usize], right: &[usize]) -> f64 {
        match &self.targets {
            Targets::Classes(ys) => {
                let gini = |idx: &[usize]| {
                    if idx.is_empty() {
                        return 0.0;
                    }
                    let n = idx.len() as f64;
                    let pos = idx.iter().filter(|&&i| ys[i]).count() as f64;
                    let p = pos / n;
                    2.0 * p * (1.0 - p) * n
                };
                gini(left) + gini(right)
            }
            Targets::GradHess(g, _) => {
                // negative sum-of-squares gain; minimizing this maximizes
                // the usual variance-reduction criterion
                let part = |idx: &[usize]| {
                    if idx.is_empty() {
                        return 0.0;
                    }
                    let s: f64 = idx.iter().map(|&i| g[i]).sum();
                    -(s * s) / idx.len() as f64
                };
                part(left) + part(right)
            }
        }
    }

    fn is_pure(&self, indices: &[usize]) -> bool {
        match &self.targets {
            Targets::Classes(ys) => {
                let first = ys[indices[0]];
                indices.iter().all(|&i| ys[i] == first)
            }
            Targets::GradHess(g, _) => {
                let first = g[indices[0]];
                indices.iter().all(|&i| g[i] == first)
            }
        }
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.xs[0].len();
        match (self.params.feature_sample, self.rng.as_deref_mut()) {
            (Some(k), Some(rng)) if k < d => {
                // partial Fisher-Yates: first k entries are the sample
                let mut all: Vec<usize> = (0..d).collect();
                for i in 0..k {
                    let j = i + rng.next_below(d - i);
                    all.swap(i, j);
                }
                let mut sample = all[..k].to_vec();
                sample.sort_unstable();
                sample
            }
            _ => (0..d).collect(),
        }
    }

    fn find_split(&mut self, indices: &[usize]) -> Option<BestSplit> {
        let parent = self.partition_score(indices, &[]) ;
        let min_leaf = self.params.min_leaf;
        let mut best: Option<BestSplit> = None;
        for f in self.candidate_features() {
            let mut order: Vec<usize> = indices.to_vec();
            order.sort_by(|&a, &b| {
                self.xs[a][f]
                    .partial_cmp(&self.xs[b][f])
                    .unwrap()
                    .then(a.cmp(&b))
            });
            for cut in min_leaf..=order.len().saturating_sub(min_leaf) {
                if cut == 0 || cut == order.len() {
                    continue;
                }
                let lo = self.xs[order[cut - 1]][f];
                let hi = self.xs[order[cut]][f];
                if lo == hi {
                    continue;
                }
                let score = self.partition_score(&order[..cut], &order[cut..]);
                // zero-gain splits are allowed (XOR-style targets need
                // them); among equal scores the first candidate wins
                let bar = best.as_ref().map_or(parent + 1e-12, |b| b.score);
                if score < bar {
                    best = Some(BestSplit {
                        feature: f,
                        threshold: (lo + hi) / 2.0,
                        score,
                    });
                }
            }
        }
        best
    }

    fn grow(&mut self, indices: &[usize], depth: usize) -> usize {
        let stop = depth >= self.params.max_depth
            || indices.len() < 2 * self.params.min_leaf
            || indices.len() < 2
            || self.is_pure(indices);
        if !stop {
            if let Some(split) = self.find_split(indices) {
                let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
                    .iter()
                    .copied()
                    .partition(|&i| self.xs[i][split.feature] <= split.threshold);
                let slot = self.nodes.len();
                self.nodes.push(Node::Leaf { value: 0.0 }); // placeholder
                let left = self.grow(&left_idx, depth + 1);
                let right = self.grow(&right_idx, depth + 1);
                self.nodes[slot] = Node::Split {
                    feature: split.feature,
                    threshold: split.threshold,
                    left,
                    right,
                };
                return slot;
            }
        }
        let value = self.leaf_value(indices);
        self.nodes.push(Node::Leaf { value });
        self.nodes.len() - 1
    }
}
