//! End-to-end acceptance suite. Each test prints one `acceptance N ...: PASS`
//! line on success; a failing assertion reports the measured values instead.

use std::collections::BTreeSet;
use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::Instant;

use ctl_surrogate::bench::{
    generate_dataset, run_benchmark, standard_splits, ExperimentConfig,
};
use ctl_surrogate::checker::label_states;
use ctl_surrogate::ctl::{self, CtlFormula};
use ctl_surrogate::features::DatasetRecord;
use ctl_surrogate::kripke::{self, GenConfig, KripkeStructure};
use ctl_surrogate::ml::{evaluate, split, train, Algorithm, Hyperparams};
use ctl_surrogate::naive::check_naive;
use ctl_surrogate::rng::{derive_seed, Rng};

const MASTER_SEED: u64 = 42;

static DATASET: OnceLock<Vec<DatasetRecord>> = OnceLock::new();

// The harness runs tests on parallel threads; the timing-sensitive checks
// need the machine to themselves, so every test takes this lock first.
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn standard_config() -> ExperimentConfig {
    ExperimentConfig::standard(400, 500, MASTER_SEED)
}

fn dataset() -> &'static [DatasetRecord] {
    DATASET.get_or_init(|| {
        // Sequential so the per-record timing baseline is free of contention.
        generate_dataset(&standard_config(), 1).expect("dataset generation")
    })
}

/// Random small instance used by the oracle and duality suites.
fn random_instance(
    seed: u64,
    max_states: usize,
    max_len: usize,
) -> (KripkeStructure, CtlFormula) {
    let mut rng = Rng::new(seed);
    let n_states = 1 + rng.next_below(max_states);
    let n_props = 1 + rng.next_below(3) as usize;
    let edge_prob = 0.15 + 0.7 * rng.next_f64();
    let len = 1 + rng.next_below(max_len);
    let k = kripke::generate(&GenConfig {
        n_states,
        n_props,
        edge_prob,
        label_prob: 0.5,
        rng_seed: derive_seed(seed, 1),
    })
    .expect("structure generation");
    let phi = ctl::generate(len, k.props(), derive_seed(seed, 2)).expect("formula generation");
    (k, phi)
}

#[test]
fn acceptance_1_oracle_agreement() {
    let _guard = serial();
    let start = Instant::now();
    let mut checked = 0usize;
    for i in 0..1000u64 {
        let (k, phi) = random_instance(derive_seed(0xACC0, i), 6, 15);
        let sat = label_states(&k, &phi);
        for s in 0..k.n_states() {
            let naive = check_naive(&k, &phi, s).expect("oracle");
            assert_eq!(
                sat.contains(s),
                naive,
                "divergence at instance {i}, state {s}: structure {}, formula {}",
                kripke::serialize(&k),
                ctl::format(&phi)
            );
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 60,
        "oracle sweep took {elapsed:?}, budget is 60 s"
    );
    println!(
        "acceptance 1 (fixpoint vs brute-force oracle, 1000 instances, {checked} state checks, {:.1} s): PASS",
        elapsed.as_secs_f64()
    );
}

#[test]
fn acceptance_2_duality_suite() {
    let _guard = serial();
    for i in 0..500u64 {
        let (k, phi) = random_instance(derive_seed(0xACC2, i), 8, 20);
        let b = || Box::new(phi.clone());
        let sat = label_states(&k, &phi);

        let neg = label_states(&k, &CtlFormula::Not(b()));
        assert_eq!(neg, sat.complement(), "negation identity, instance {i}");

        let ag = label_states(&k, &CtlFormula::AG(b()));
        let not_ef_not = label_states(
            &k,
            &CtlFormula::Not(Box::new(CtlFormula::EF(Box::new(CtlFormula::Not(b()))))),
        );
        assert_eq!(ag, not_ef_not, "AG/EF identity, instance {i}");

        let ef = label_states(&k, &CtlFormula::EF(b()));
        let eu_true = label_states(&k, &CtlFormula::EU(Box::new(CtlFormula::True), b()));
        assert_eq!(ef, eu_true, "EF/EU identity, instance {i}");

        let af = label_states(&k, &CtlFormula::AF(b()));
        let not_eg_not = label_states(
            &k,
            &CtlFormula::Not(Box::new(CtlFormula::EG(Box::new(CtlFormula::Not(b()))))),
        );
        assert_eq!(af, not_eg_not, "AF/EG identity, instance {i}");
    }
    println!("acceptance 2 (four duality identities, 500 instances, 0 violations): PASS");
}

#[test]
fn acceptance_3_dataset_reproduction() {
    let _guard = serial();
    let cfg = standard_config();
    let start = Instant::now();
    let first = generate_dataset(&cfg, 4).expect("generation");
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 600,
        "400-record generation took {elapsed:?}, budget is 10 min"
    );
    assert_eq!(first.len(), 400);

    for i in 0..400u64 {
        let record_seed = derive_seed(cfg.master_seed, i);
        let k = kripke::generate(&GenConfig {
            n_states: cfg.gen.n_states,
            n_props: cfg.gen.n_props,
            edge_prob: cfg.gen.edge_prob,
            label_prob: cfg.gen.label_prob,
            rng_seed: derive_seed(record_seed, 1),
        })
        .expect("structure");
        let phi = ctl::generate(cfg.formula_length, k.props(), derive_seed(record_seed, 2))
            .expect("formula");
        assert_eq!(phi.len(), 500, "record {i} formula length");
    }

    let second = generate_dataset(&cfg, 1).expect("rerun");
    assert_eq!(
        ctl_surrogate::bench::fingerprint(&first),
        ctl_surrogate::bench::fingerprint(&second),
        "rerun fingerprint differs"
    );
    for (a, b) in first.iter().zip(&second) {
        assert_eq!(a.features, b.features);
        assert_eq!(a.label, b.label);
    }
    println!(
        "acceptance 3 (400 records, every formula length 500, rerun identical, {:.1} s): PASS",
        elapsed.as_secs_f64()
    );
}

#[test]
fn acceptance_4_split_parameters() {
    let _guard = serial();
    let records = dataset();
    let expected = [
        (Algorithm::Rf, 459u64, 0.8, 320, 80),
        (Algorithm::Bt, 536, 0.8, 320, 80),
        (Algorithm::Knn, 399, 0.86, 344, 56),
        (Algorithm::Dt, 536, 0.8, 320, 80),
        (Algorithm::Lr, 2077, 0.8, 320, 80),
    ];
    let splits = standard_splits();
    for (algo, seed, fraction, n_train, n_test) in expected {
        let cfg = splits[&algo];
        assert_eq!(cfg.seed, seed, "{algo} split seed");
        assert_eq!(cfg.fraction, fraction, "{algo} split fraction");
        let (tr, te) = split(records, &cfg).expect("split");
        assert_eq!((tr.len(), te.len()), (n_train, n_test), "{algo} split sizes");
        let (tr2, te2) = split(records, &cfg).expect("split rerun");
        let key = |rs: &[DatasetRecord]| -> Vec<Vec<u64>> {
            rs.iter()
                .map(|r| r.features.iter().map(|f| f.to_bits()).collect())
                .collect()
        };
        assert_eq!(key(&tr), key(&tr2), "{algo} split not deterministic");
        assert_eq!(key(&te), key(&te2), "{algo} split not deterministic");
    }
    println!("acceptance 4 (split seeds 459/536/399/536/2077 give 320/80, 320/80, 344/56, 320/80, 320/80): PASS");
}

#[test]
fn acceptance_5_surrogate_accuracy() {
    let _guard = serial();
    let records = dataset();
    let splits = standard_splits();
    let hp = Hyperparams::default();
    let mut accs = Vec::new();
    for algo in Algorithm::ALL {
        let cfg = splits[&algo];
        let (tr, te) = split(records, &cfg).expect("split");
        let train_seed = derive_seed(cfg.seed, 0xA1);
        let model = train(algo, &tr, &hp, train_seed).expect("train");
        let report = evaluate(&model, &te).expect("evaluate");
        let model2 = train(algo, &tr, &hp, train_seed).expect("retrain");
        let report2 = evaluate(&model2, &te).expect("re-evaluate");
        assert_eq!(
            report.accuracy, report2.accuracy,
            "{algo} accuracy not deterministic"
        );
        let pos = te.iter().filter(|r| r.label).count();
        let baseline = pos.max(te.len() - pos) as f64 / te.len() as f64;
        accs.push((algo, report.accuracy, baseline));
    }
    for (algo, acc, baseline) in &accs {
        println!("  {algo}: test accuracy {acc:.4}, majority baseline {baseline:.4}");
    }
    let best_non_knn = accs
        .iter()
        .filter(|(a, _, _)| *a != Algorithm::Knn)
        .map(|(_, acc, _)| *acc)
        .fold(0.0f64, f64::max);
    for (algo, acc, baseline) in &accs {
        assert!(
            acc >= &(baseline + 0.05),
            "{algo} accuracy {acc:.4} does not beat majority baseline {baseline:.4} by 5 points"
        );
    }
    assert!(
        best_non_knn >= 0.90,
        "best of LR/BT/RF/DT reached {best_non_knn:.4}, required 0.90"
    );
    println!("acceptance 5 (best non-KNN accuracy {best_non_knn:.4} >= 0.90, all beat baseline + 0.05): PASS");
}

#[test]
fn acceptance_6_speedup_direction() {
    let _guard = serial();
    let records = dataset();
    let cfg = standard_config();
    let report = run_benchmark(records, &cfg, &Algorithm::ALL, &Hyperparams::default())
        .expect("benchmark");
    for row in &report.rows {
        println!(
            "  {}: t1 {:.3e} s, t2 {:.3e} s, ratio {}",
            row.algorithm, row.t1_mean_s, row.t2_mean_s, row.ratio
        );
    }
    for row in &report.rows {
        if row.algorithm == Algorithm::Knn {
            assert!(
                row.ratio < 1.0,
                "KNN ratio {} expected below 1 (its scan dominates one exact check)",
                row.ratio
            );
        } else {
            assert!(
                row.ratio >= 50.0,
                "{} ratio {} expected at least 50",
                row.algorithm,
                row.ratio
            );
        }
    }
    println!("acceptance 6 (t1/t2 >= 50 for RF, BT, DT, LR; < 1 for KNN): PASS");
}

#[test]
fn acceptance_7_classifier_sanity() {
    let _guard = serial();
    let rec = |features: Vec<f64>, label: bool| DatasetRecord {
        features,
        label,
        check_time_ns: 0,
    };
    let hp = Hyperparams::default();

    // LR separates y = sign(x1 - x2) perfectly.
    let mut rng = Rng::new(7);
    let mut sep: Vec<DatasetRecord> = Vec::new();
    while sep.len() < 60 {
        let a = rng.next_f64() * 2.0 - 1.0;
        let b = rng.next_f64() * 2.0 - 1.0;
        if (a - b).abs() >= 0.1 {
            sep.push(rec(vec![a, b], a > b));
        }
    }
    let mut lr_hp = hp.clone();
    lr_hp.lr_rate = 0.5;
    lr_hp.lr_epochs = 2000;
    let lr = train(Algorithm::Lr, &sep, &lr_hp, 1).expect("train lr");
    assert!(
        sep.iter()
            .all(|r| lr.predict(&r.features).unwrap() == r.label),
        "LR failed on linearly separable data"
    );

    // Depth-2 tree solves XOR.
    let xor: Vec<DatasetRecord> = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]
        .iter()
        .map(|&(a, b)| rec(vec![a, b], a != b))
        .collect();
    let mut dt_hp = hp.clone();
    dt_hp.dt_max_depth = 2;
    let dt = train(Algorithm::Dt, &xor, &dt_hp, 1).expect("train dt");
    assert!(
        xor.iter()
            .all(|r| dt.predict(&r.features).unwrap() == r.label),
        "depth-2 tree failed on XOR"
    );

    // k=1 memorizes any duplicate-free training set.
    let mut knn_hp = hp.clone();
    knn_hp.knn_k = 1;
    let sample: Vec<DatasetRecord> = dataset()[..50].to_vec();
    let knn = train(Algorithm::Knn, &sample, &knn_hp, 1).expect("train knn");
    assert!(
        sample
            .iter()
            .all(|r| knn.predict(&r.features).unwrap() == r.label),
        "1-NN failed to memorize its training set"
    );

    // LR and BT training losses never increase.
    let sample: Vec<DatasetRecord> = dataset()[..100].to_vec();
    let monotone = |losses: &[f64], what: &str| {
        for w in losses.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "{what} loss increased: {w:?}");
        }
    };
    let lr = train(Algorithm::Lr, &sample, &hp, 1).expect("train lr");
    let bt = train(Algorithm::Bt, &sample, &hp, 1).expect("train bt");
    monotone(lr.training_losses(), "LR");
    monotone(bt.training_losses(), "BT");

    println!("acceptance 7 (LR separable, DT XOR, 1-NN memorization, monotone LR/BT losses): PASS");
}

#[test]
fn acceptance_8_round_trips() {
    let _guard = serial();
    let props: Vec<String> = (0..4).map(|i| format!("p{i}")).collect();
    let mut rng = Rng::new(0xACC8);
    for _ in 0..300 {
        let len = 1 + rng.next_below(200);
        let phi = ctl::generate(len, &props, rng.next_u64()).expect("formula");
        let text = ctl::format(&phi);
        assert_eq!(ctl::parse(&text).expect("reparse"), phi, "formula round trip: {text}");
    }
    for i in 0..300u64 {
        let seed = derive_seed(0xACC9, i);
        let mut r = Rng::new(seed);
        let k = kripke::generate(&GenConfig {
            n_states: 1 + r.next_below(10),
            n_props: 1 + r.next_below(4),
            edge_prob: 0.1 + 0.9 * r.next_f64(),
            label_prob: r.next_f64(),
            rng_seed: derive_seed(seed, 1),
        })
        .expect("structure");
        let text = kripke::serialize(&k);
        assert_eq!(kripke::parse(&text).expect("reparse"), k, "structure round trip: {text}");
    }
    let sample: Vec<DatasetRecord> = dataset()[..80].to_vec();
    let probes: BTreeSet<usize> = (0..40).map(|i| 80 + i * 3).collect();
    for algo in Algorithm::ALL {
        let model = train(algo, &sample, &Hyperparams::default(), 5).expect("train");
        let restored =
            ctl_surrogate::ml::TrainedModel::from_text(&model.to_text().expect("serialize"))
                .expect("deserialize");
        for &i in &probes {
            let x = &dataset()[i].features;
            assert_eq!(
                model.predict(x).unwrap(),
                restored.predict(x).unwrap(),
                "{algo} persistence changed a prediction"
            );
        }
    }
    println!("acceptance 8 (formula, structure, and model persistence round trips): PASS");
}
