//! End-to-end experiment harness: dataset generation from a master seed,
//! per-algorithm train/evaluate runs, and the t1/t2 speedup report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::checker;
use crate::ctl;
use crate::features::{self, DatasetRecord, EncodeError, EncodingConfig};
use crate::kripke::{self, GenConfig, KripkeError};
use crate::ml::{self, Algorithm, Hyperparams, MlError, SplitConfig};
use crate::rng::derive_seed;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error(transparent)]
    Kripke(#[from] KripkeError),
    #[error("formula generation: {0}")]
    Ctl(#[from] ctl::CtlError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Ml(#[from] MlError),
}

/// Structure-generator template; the per-record seed is filled in by the
/// harness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenTemplate {
    pub n_states: usize,
    pub n_props: usize,
    pub edge_prob: f64,
    pub label_prob: f64,
}

impl GenTemplate {
    pub fn standard() -> Self {
        GenTemplate {
            n_states: 10,
            n_props: 4,
            edge_prob: 0.25,
            label_prob: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_records: usize,
    pub formula_length: usize,
    pub gen: GenTemplate,
    pub encoding: EncodingConfig,
    pub splits: BTreeMap<Algorithm, SplitConfig>,
    pub master_seed: u64,
}

/// Split parameters used for the headline runs: seed/fraction pairs
/// 459/0.8 (RF), 536/0.8 (BT), 399/0.86 (KNN), 536/0.8 (DT), 2077/0.8 (LR).
pub fn standard_splits() -> BTreeMap<Algorithm, SplitConfig> {
    BTreeMap::from([
        (Algorithm::Rf, SplitConfig { seed: 459, fraction: 0.8 }),
        (Algorithm::Bt, SplitConfig { seed: 536, fraction: 0.8 }),
        (Algorithm::Knn, SplitConfig { seed: 399, fraction: 0.86 }),
        (Algorithm::Dt, SplitConfig { seed: 536, fraction: 0.8 }),
        (Algorithm::Lr, SplitConfig { seed: 2077, fraction: 0.8 }),
    ])
}

impl ExperimentConfig {
    pub fn standard(n_records: usize, formula_length: usize, master_seed: u64) -> Self {
        ExperimentConfig {
            n_records,
            formula_length,
            gen: GenTemplate::standard(),
            encoding: EncodingConfig::standard(),
            splits: standard_splits(),
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.n_records == 0 {
            return Err(BenchError::Config("n_records must be >= 1".into()));
        }
        if self.formula_length == 0 {
            return Err(BenchError::Config("formula_length must be >= 1".into()));
        }
        if self.formula_length > self.encoding.max_formula_len {
            return Err(BenchError::Config(format!(
                "formula_length {} exceeds encoding cap {}",
                self.formula_length, self.encoding.max_formula_len
            )));
        }
        if self.gen.n_states > self.encoding.max_states {
            return Err(BenchError::Config(format!(
                "gen n_states {} exceeds encoding cap {}",
                self.gen.n_states, self.encoding.max_states
            )));
        }
        if self.gen.n_props > self.encoding.max_props {
            return Err(BenchError::Config(format!(
                "gen n_props {} exceeds encoding cap {}",
                self.gen.n_props, self.encoding.max_props
            )));
        }
        Ok(())
    }

    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex_digest(json.as_bytes())
    }
}

pub fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn generate_record(cfg: &ExperimentConfig, index: usize) -> Result<DatasetRecord, BenchError> {
    let record_seed = derive_seed(cfg.master_seed, index as u64);
    let k = kripke::generate(&GenConfig {
        n_states: cfg.gen.n_states,
        n_props: cfg.gen.n_props,
        edge_prob: cfg.gen.edge_prob,
        label_prob: cfg.gen.label_prob,
        rng_seed: derive_seed(record_seed, 1),
    })?;
    let phi = ctl::generate(cfg.formula_length, k.props(), derive_seed(record_seed, 2))?;
    let result = checker::check(&k, &phi);
    Ok(features::build_record(&k, &phi, &cfg.encoding, &result)?)
}

/// Generates the full record set. Each record is a pure function of
/// (master_seed, index), so `jobs > 1` produces output identical to a
/// sequential run.
pub fn generate_dataset(cfg: &ExperimentConfig, jobs: usize) -> Result<Vec<DatasetRecord>, BenchError> {
    cfg.validate()?;
    let jobs = jobs.max(1).min(cfg.n_records);
    if jobs == 1 {
        return (0..cfg.n_records).map(|i| generate_record(cfg, i)).collect();
    }
    let chunk = cfg.n_records.div_ceil(jobs);
    let mut results: Vec<Result<Vec<DatasetRecord>, BenchError>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|w| {
                let lo = w * chunk;
                let hi = ((w + 1) * chunk).min(cfg.n_records);
                scope.spawn(move || (lo..hi).map(|i| generate_record(cfg, i)).collect())
            })
            .collect();
        for h in handles {
            results.push(h.join().expect("worker panicked"));
        }
    });
    let mut records = Vec::with_capacity(cfg.n_records);
    for r in results {
        records.extend(r?);
    }
    Ok(records)
}

/// Canonical dataset file bytes for a record set.
pub fn dataset_bytes(records: &[DatasetRecord], d: usize) -> Vec<u8> {
    let mut buf = Vec::new();
    features::write_dataset(&mut buf, records, d).expect("in-memory write");
    buf
}

/// Content hash of a dataset: features and labels only. The stored check
/// times are wall-clock measurements and would break rerun-identical
/// hashes if included.
pub fn fingerprint(records: &[DatasetRecord]) -> String {
    let mut hasher = Sha256::new();
    for r in records {
        let mut line = String::new();
        for x in &r.features {
            line.push_str(&x.to_string());
            line.push(',');
        }
        line.push_str(if r.label { "1\n" } else { "0\n" });
        hasher.update(line.as_bytes());
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub algorithm: Algorithm,
    pub accuracy: f64,
    pub t1_mean_s: f64,
    pub t2_mean_s: f64,
    /// Speedup t1/t2, recomputed from the rounded column values.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub dataset_fingerprint: String,
    pub config_hash: String,
}

/// Rounds to `sig` significant digits.
pub fn round_sig(x: f64, sig: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exp = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(sig - 1 - exp);
    (x * factor).round() / factor
}

/// Decimal rendering of a value rounded to 4 significant digits.
pub fn format_sig4(x: f64) -> String {
    let r = round_sig(x, 4);
    if r == 0.0 {
        return "0".into();
    }
    let exp = r.abs().log10().floor() as i32;
    let decimals = (3 - exp).max(0) as usize;
    format!("{r:.decimals$}")
}

pub fn run_benchmark(
    records: &[DatasetRecord],
    cfg: &ExperimentConfig,
    algorithms: &[Algorithm],
    hp: &Hyperparams,
) -> Result<BenchReport, BenchError> {
    cfg.validate()?;
    let d = cfg.encoding.dim();
    if let Some(r) = records.iter().find(|r| r.features.len() != d) {
        return Err(BenchError::Ml(MlError::DimMismatch {
            expected: d,
            got: r.features.len(),
        }));
    }
    let mut rows = Vec::with_capacity(algorithms.len());
    for &algo in algorithms {
        let split_cfg = cfg
            .splits
            .get(&algo)
            .copied()
            .ok_or_else(|| BenchError::Config(format!("no split config for {algo}")))?;
        let (train, test) = ml::split(records, &split_cfg)?;
        let model = ml::train(algo, &train, hp, derive_seed(split_cfg.seed, 0xA1))?;
        let eval = ml::evaluate(&model, &test)?;
        // t1 is reused from generation-time check measurements
        let t1_total: f64 = test.iter().map(|r| r.check_time_ns as f64).sum();
        let t1 = round_sig(t1_total / test.len() as f64 / 1e9, 4);
        let t2 = round_sig(eval.mean_predict_ns / 1e9, 4);
        rows.push(BenchRow {
            algorithm: algo,
            accuracy: eval.accuracy,
            t1_mean_s: t1,
            t2_mean_s: t2,
            ratio: round_sig(t1 / t2, 4),
        });
    }
    Ok(BenchReport {
        rows,
        dataset_fingerprint: fingerprint(records),
        config_hash: cfg.hash(),
    })
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# ctl-surrogate bench report v{}\n", env!("CARGO_PKG_VERSION")));
        out.push_str(&format!("# config_hash={}\n", self.config_hash));
        out.push_str(&format!("# dataset_fingerprint={}\n", self.dataset_fingerprint));
        out.push_str("# t1 reused from generation-time exact-check measurements\n");
        out.push_str("algorithm,accuracy,t1_mean_s,t2_mean_s,ratio\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.algorithm,
                format_sig4(row.accuracy),
                format_sig4(row.t1_mean_s),
                format_sig4(row.t2_mean_s),
                format_sig4(row.ratio),
            ));
        }
        out
    }
}
