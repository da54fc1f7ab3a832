//! Seeded train/test splitting, the five surrogate classifiers, and
//! evaluation with per-record prediction timing.

pub mod boost;
pub mod forest;
pub mod knn;
pub mod linear;
pub mod tree;

use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::DatasetRecord;
use crate::rng::Rng;

use boost::BoostedTrees;
use forest::RandomForest;
use knn::Knn;
use linear::LogisticRegression;
use tree::{ClassificationTree, TreeParams};

#[derive(Debug, Error, PartialEq)]
pub enum MlError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("fraction must be in (0, 1), got {0}")]
    BadFraction(f64),
    #[error("feature dimension mismatch: model expects {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("invalid hyperparameter: {0}")]
    BadHyperparam(String),
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("model persistence error: {0}")]
    Persist(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    Rf,
    Bt,
    Knn,
    Dt,
    Lr,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Rf,
        Algorithm::Bt,
        Algorithm::Knn,
        Algorithm::Dt,
        Algorithm::Lr,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Rf => "RF",
            Algorithm::Bt => "BT",
            Algorithm::Knn => "KNN",
            Algorithm::Dt => "DT",
            Algorithm::Lr => "LR",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = MlError;

    fn from_str(s: &str) -> Result<Self, MlError> {
        match s.to_ascii_uppercase().as_str() {
            "RF" => Ok(Algorithm::Rf),
            "BT" => Ok(Algorithm::Bt),
            "KNN" => Ok(Algorithm::Knn),
            "DT" => Ok(Algorithm::Dt),
            "LR" => Ok(Algorithm::Lr),
            _ => Err(MlError::UnknownAlgorithm(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub seed: u64,
    pub fraction: f64,
}

/// Seeded uniform shuffle; the first floor(fraction * N) records form the
/// training set, the remainder the test set.
pub fn split(
    records: &[DatasetRecord],
    cfg: &SplitConfig,
) -> Result<(Vec<DatasetRecord>, Vec<DatasetRecord>), MlError> {
    if records.is_empty() {
        return Err(MlError::EmptyDataset);
    }
    if !(cfg.fraction > 0.0 && cfg.fraction < 1.0) {
        return Err(MlError::BadFraction(cfg.fraction));
    }
    let n = records.len();
    let mut order: Vec<usize> = (0..n).collect();
    Rng::new(cfg.seed).shuffle(&mut order);
    // small epsilon so exact rationals like 0.86 * 400 floor correctly
    let n_train = ((cfg.fraction * n as f64) + 1e-9).floor() as usize;
    let n_train = n_train.min(n);
    let train = order[..n_train].iter().map(|&i| records[i].clone()).collect();
    let test = order[n_train..].iter().map(|&i| records[i].clone()).collect();
    Ok((train, test))
}

/// Declared defaults for all five algorithms; the original experiment's
/// platform defaults are unknown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub lr_rate: f64,
    pub lr_epochs: usize,
    pub lr_l2: f64,
    pub dt_max_depth: usize,
    pub dt_min_leaf: usize,
    pub rf_trees: usize,
    pub rf_max_depth: usize,
    pub bt_rounds: usize,
    pub bt_depth: usize,
    pub bt_rate: f64,
    pub knn_k: usize,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            lr_rate: 0.1,
            lr_epochs: 200,
            lr_l2: 1e-4,
            dt_max_depth: 10,
            dt_min_leaf: 1,
            rf_trees: 10,
            rf_max_depth: 10,
            bt_rounds: 10,
            bt_depth: 6,
            bt_rate: 0.3,
            knn_k: 5,
        }
    }
}

impl Hyperparams {
    fn validate(&self) -> Result<(), MlError> {
        let positive = [
            ("lr_epochs", self.lr_epochs),
            ("dt_max_depth", self.dt_max_depth),
            ("dt_min_leaf", self.dt_min_leaf),
            ("rf_trees", self.rf_trees),
            ("rf_max_depth", self.rf_max_depth),
            ("bt_rounds", self.bt_rounds),
            ("bt_depth", self.bt_depth),
            ("knn_k", self.knn_k),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(MlError::BadHyperparam(format!("{name} must be >= 1")));
            }
        }
        if self.lr_rate <= 0.0 || self.bt_rate <= 0.0 || self.lr_l2 < 0.0 {
            return Err(MlError::BadHyperparam("rates must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelParams {
    Lr(LogisticRegression),
    Dt(ClassificationTree),
    Rf(RandomForest),
    Bt(BoostedTrees),
    Knn(Knn),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub algorithm: Algorithm,
    pub n_features: usize,
    pub hyperparams: Hyperparams,
    pub params: ModelParams,
}

pub fn train(
    algorithm: Algorithm,
    records: &[DatasetRecord],
    hp: &Hyperparams,
    train_seed: u64,
) -> Result<TrainedModel, MlError> {
    if records.is_empty() {
        return Err(MlError::EmptyDataset);
    }
    hp.validate()?;
    let xs: Vec<&[f64]> = records.iter().map(|r| r.features.as_slice()).collect();
    let ys: Vec<bool> = records.iter().map(|r| r.label).collect();
    let n_features = xs[0].len();
    let params = match algorithm {
        Algorithm::Lr => ModelParams::Lr(LogisticRegression::fit(
            &xs, &ys, hp.lr_rate, hp.lr_epochs, hp.lr_l2,
        )),
        Algorithm::Dt => {
            let indices: Vec<usize> = (0..xs.len()).collect();
            ModelParams::Dt(ClassificationTree::fit(
                &xs,
                &ys,
                &indices,
                &TreeParams {
                    max_depth: hp.dt_max_depth,
                    min_leaf: hp.dt_min_leaf,
                    feature_sample: None,
                },
                None,
            ))
        }
        Algorithm::Rf => ModelParams::Rf(RandomForest::fit(
            &xs,
            &ys,
            hp.rf_trees,
            hp.rf_max_depth,
            hp.dt_min_leaf,
            train_seed,
        )),
        Algorithm::Bt => ModelParams::Bt(BoostedTrees::fit(
            &xs, &ys, hp.bt_rounds, hp.bt_depth, hp.bt_rate,
        )),
        Algorithm::Knn => ModelParams::Knn(Knn::fit(&xs, &ys, hp.knn_k)),
    };
    Ok(TrainedModel {
        algorithm,
        n_features,
        hyperparams: *hp,
        params,
    })
}

impl TrainedModel {
    /// Class decision at the 0.5 threshold (>= convention); KNN uses its
    /// own tie rules.
    pub fn predict(&self, features: &[f64]) -> Result<bool, MlError> {
        if features.len() != self.n_features {
            return Err(MlError::DimMismatch {
                expected: self.n_features,
                got: features.len(),
            });
        }
        Ok(match &self.params {
            ModelParams::Lr(m) => m.prob(features) >= 0.5,
            ModelParams::Dt(m) => m.prob(features) >= 0.5,
            ModelParams::Rf(m) => m.prob(features) >= 0.5,
            ModelParams::Bt(m) => m.prob(features) >= 0.5,
            ModelParams::Knn(m) => m.predict(features),
        })
    }

    /// Per-epoch (LR) or per-round (BT) training losses; empty for models
    /// without an iterative fit.
    pub fn training_losses(&self) -> &[f64] {
        match &self.params {
            ModelParams::Lr(m) => &m.losses,
            ModelParams::Bt(m) => &m.losses,
            _ => &[],
        }
    }

    pub fn to_text(&self) -> Result<String, MlError> {
        serde_json::to_string_pretty(self).map_err(|e| MlError::Persist(e.to_string()))
    }

    pub fn from_text(text: &str) -> Result<Self, MlError> {
        serde_json::from_str(text).map_err(|e| MlError::Persist(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    /// Mean per-record prediction time: median of 5 repetitions after one
    /// warm-up pass, averaged over the test set.
    pub mean_predict_ns: f64,
    pub n_test: usize,
}

pub fn evaluate(model: &TrainedModel, test: &[DatasetRecord]) -> Result<EvalReport, MlError> {
    if test.is_empty() {
        return Err(MlError::EmptyDataset);
    }
    let mut correct = 0usize;
    let mut total_ns = 0.0f64;
    for r in test {
        let pred = model.predict(&r.features)?; // warm-up
        let mut reps = [0u64; 5];
        for slot in reps.iter_mut() {
            let start = Instant::now();
            let p = model.predict(&r.features)?;
            *slot = start.elapsed().as_nanos() as u64;
            debug_assert_eq!(p, pred);
        }
        reps.sort_unstable();
        total_ns += reps[2] as f64;
        if pred == r.label {
            correct += 1;
        }
    }
    Ok(EvalReport {
        accuracy: correct as f64 / test.len() as f64,
        mean_predict_ns: total_ns / test.len() as f64,
        n_test: test.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(features: Vec<f64>, label: bool) -> DatasetRecord {
        DatasetRecord {
            features,
            label,
            check_time_ns: 0,
        }
    }

    fn toy_dataset(n: usize) -> Vec<DatasetRecord> {
        (0..n)
            .map(|i| record(vec![i as f64, (n - i) as f64], i * 2 >= n))
            .collect()
    }

    #[test]
    fn split_sizes_table_params() {
        let data = toy_dataset(400);
        let (train, test) = split(&data, &SplitConfig { seed: 459, fraction: 0.8 }).unwrap();
        assert_eq!((train.len(), test.len()), (320, 80));
        let (train, test) = split(&data, &SplitConfig { seed: 399, fraction: 0.86 }).unwrap();
        assert_eq!((train.len(), test.len()), (344, 56));
    }

    #[test]
    fn split_deterministic_and_disjoint() {
        let data = toy_dataset(50);
        let cfg = SplitConfig { seed: 7, fraction: 0.7 };
        let (a_train, a_test) = split(&data, &cfg).unwrap();
        let (b_train, b_test) = split(&data, &cfg).unwrap();
        assert_eq!(a_train, b_train);
        assert_eq!(a_test, b_test);
        let mut all: Vec<f64> = a_train
            .iter()
            .chain(&a_test)
            .map(|r| r.features[0])
            .collect();
        all.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(all, (0..50).map(|i| i as f64).collect::<Vec<_>>());
    }

    #[test]
    fn split_rejects_bad_inputs() {
        assert_eq!(
            split(&[], &SplitConfig { seed: 1, fraction: 0.5 }),
            Err(MlError::EmptyDataset)
        );
        assert_eq!(
            split(&toy_dataset(4), &SplitConfig { seed: 1, fraction: 1.0 }),
            Err(MlError::BadFraction(1.0))
        );
    }

    #[test]
    fn all_algorithms_train_and_predict() {
        let data = toy_dataset(60);
        let hp = Hyperparams::default();
        for algo in Algorithm::ALL {
            let model = train(algo, &data, &hp, 5).unwrap();
            let report = evaluate(&model, &data).unwrap();
            assert!(report.accuracy > 0.8, "{algo}: {}", report.accuracy);
            assert_eq!(report.n_test, 60);
        }
    }

    #[test]
    fn single_class_training_predicts_constantly() {
        let data: Vec<DatasetRecord> =
            (0..10).map(|i| record(vec![i as f64], false)).collect();
        for algo in Algorithm::ALL {
            let model = train(algo, &data, &Hyperparams::default(), 1).unwrap();
            for r in &data {
                assert!(!model.predict(&r.features).unwrap(), "{algo}");
            }
            assert!(!model.predict(&[1e6]).unwrap(), "{algo}");
        }
    }

    #[test]
    fn dim_mismatch_is_an_error() {
        let model = train(Algorithm::Dt, &toy_dataset(10), &Hyperparams::default(), 0).unwrap();
        assert_eq!(
            model.predict(&[1.0]),
            Err(MlError::DimMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn training_deterministic() {
        let data = toy_dataset(40);
        let hp = Hyperparams::default();
        for algo in Algorithm::ALL {
            assert_eq!(
                train(algo, &data, &hp, 77).unwrap(),
                train(algo, &data, &hp, 77).unwrap(),
                "{algo}"
            );
        }
    }

    #[test]
    fn persistence_roundtrip_predict_equivalence() {
        let data = toy_dataset(30);
        let hp = Hyperparams::default();
        for algo in Algorithm::ALL {
            let model = train(algo, &data, &hp, 3).unwrap();
            let restored = TrainedModel::from_text(&model.to_text().unwrap()).unwrap();
            assert_eq!(model, restored);
            for r in &data {
                assert_eq!(
                    model.predict(&r.features).unwrap(),
                    restored.predict(&r.features).unwrap()
                );
            }
        }
    }

    #[test]
    fn bad_hyperparams_rejected() {
        let mut hp = Hyperparams::default();
        hp.knn_k = 0;
        assert!(matches!(
            train(Algorithm::Knn, &toy_dataset(5), &hp, 0),
            Err(MlError::BadHyperparam(_))
        ));
    }

    #[test]
    fn algorithm_parsing() {
        assert_eq!("rf".parse::<Algorithm>().unwrap(), Algorithm::Rf);
        assert_eq!("KNN".parse::<Algorithm>().unwrap(), Algorithm::Knn);
        assert!("xgb".parse::<Algorithm>().is_err());
    }
}
