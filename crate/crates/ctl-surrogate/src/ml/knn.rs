//! K-nearest-neighbor classifier: stored training matrix, Euclidean
//! distance, majority vote. Vote ties fall to `false`; distance ties break
//! by lower training index.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    pub k: usize,
    pub xs: Vec<Vec<f64>>,
    pub ys: Vec<bool>,
}

impl Knn {
    pub fn fit(xs: &[&[f64]], ys: &[bool], k: usize) -> Self {
        Knn {
            k,
            xs: xs.iter().map(|x| x.to_vec()).collect(),
            ys: ys.to_vec(),
        }
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        let mut dists: Vec<(f64, usize)> = self
            .xs
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let d2: f64 = row.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, i)
            })
            .collect();
        dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let k = self.k.min(dists.len());
        let pos = dists[..k].iter().filter(|&&(_, i)| self.ys[i]).count();
        pos * 2 > k
    }
}
