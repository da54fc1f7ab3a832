//! Logistic regression trained by full-batch gradient descent with L2
//! regularization. The step is halved whenever it would raise the
//! objective, so the per-epoch loss is non-increasing by construction.

use serde::{Deserialize, Serialize};

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegression {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Objective value after each epoch, first entry is the initial loss.
    pub losses: Vec<f64>,
}

fn objective(xs: &[&[f64]], ys: &[bool], w: &[f64], b: f64, l2: f64) -> f64 {
    let n = xs.len() as f64;
    let mut loss = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let z = dot(w, x) + b;
        let t = if y { 1.0 } else { 0.0 };
        // numerically stable log(1 + exp(-|z|)) form
        loss += z.max(0.0) - z * t + (-z.abs()).exp().ln_1p();
    }
    loss / n + 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl LogisticRegression {
    pub fn fit(xs: &[&[f64]], ys: &[bool], rate: f64, epochs: usize, l2: f64) -> Self {
        let d = xs[0].len();
        let n = xs.len() as f64;
        let mut w = vec![0.0; d];
        let mut b = 0.0;
        let mut losses = vec![objective(xs, ys, &w, b, l2)];
        let mut grad_w = vec![0.0; d];
        for _ in 0..epochs {
            grad_w.iter_mut().for_each(|g| *g = 0.0);
            let mut grad_b = 0.0;
            for (x, &y) in xs.iter().zip(ys) {
                let err = sigmoid(dot(&w, x) + b) - if y { 1.0 } else { 0.0 };
                for (g, xi) in grad_w.iter_mut().zip(*x) {
                    *g += err * xi;
                }
                grad_b += err;
            }
            for (g, wi) in grad_w.iter_mut().zip(&w) {
                *g = *g / n + l2 * wi;
            }
            grad_b /= n;

            let prev = *losses.last().unwrap();
            let mut step = rate;
            let (mut cand_w, mut cand_b);
            loop {
                cand_w = w
                    .iter()
                    .zip(&grad_w)
                    .map(|(wi, gi)| wi - step * gi)
                    .collect::<Vec<_>>();
                cand_b = b - step * grad_b;
                let loss = objective(xs, ys, &cand_w, cand_b, l2);
                if loss <= prev || step < 1e-12 {
                    losses.push(loss.min(prev));
                    break;
                }
                step *= 0.5;
            }
            if *losses.last().unwrap() < prev {
                w = cand_w;
                b = cand_b;
            } else {
                losses.pop();
                losses.push(prev);
            }
        }
        LogisticRegression {
            weights: w,
            bias: b,
            losses,
        }
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    pub fn prob(&self, x: &[f64]) -> f64 {
        sigmoid(self.score(x))
    }
}
