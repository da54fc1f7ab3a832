//! Command-line frontend: dataset generation, exact checking, training,
//! evaluation, benchmarking, and SMV export.

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use ctl_surrogate::bench::{self, ExperimentConfig, GenTemplate};
use ctl_surrogate::features::{self, EncodingConfig};
use ctl_surrogate::ml::{self, Algorithm, Hyperparams, TrainedModel};
use ctl_surrogate::{checker, ctl, kripke};

#[derive(Parser)]
#[command(name = "ctl-surrogate", version, about = "CTL model checking with ML surrogates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled dataset of (structure, formula, verdict) records
    GenData(GenDataArgs),
    /// Check one structure against one formula
    Check(CheckArgs),
    /// Train a single classifier on a dataset
    Train(TrainArgs),
    /// Evaluate a saved model on a dataset
    Eval(EvalArgs),
    /// Run the full per-algorithm benchmark and write the report CSV
    Bench(BenchArgs),
    /// Export a structure and property as an SMV module
    ExportSmv(ExportSmvArgs),
}

#[derive(Args)]
struct CommonOpts {
    /// Config file with key=value lines; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct GenDataArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long)]
    records: Option<usize>,
    #[arg(long = "formula-len")]
    formula_len: Option<usize>,
    #[arg(long)]
    states: Option<usize>,
    #[arg(long)]
    props: Option<usize>,
    #[arg(long = "edge-prob")]
    edge_prob: Option<f64>,
    #[arg(long = "label-prob")]
    label_prob: Option<f64>,
    /// Master seed deriving all per-record seeds
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "max-states")]
    max_states: Option<usize>,
    #[arg(long = "max-props")]
    max_props: Option<usize>,
    #[arg(long = "max-formula-len")]
    max_formula_len: Option<usize>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    /// Path to a Kripke structure in the text format
    #[arg(long)]
    kripke: PathBuf,
    /// Path to a CTL formula
    #[arg(long)]
    formula: PathBuf,
}

#[derive(Args)]
struct HpArgs {
    #[arg(long = "lr-rate")]
    lr_rate: Option<f64>,
    #[arg(long = "lr-epochs")]
    lr_epochs: Option<usize>,
    #[arg(long = "lr-l2")]
    lr_l2: Option<f64>,
    #[arg(long = "dt-max-depth")]
    dt_max_depth: Option<usize>,
    #[arg(long = "dt-min-leaf")]
    dt_min_leaf: Option<usize>,
    #[arg(long = "rf-trees")]
    rf_trees: Option<usize>,
    #[arg(long = "rf-max-depth")]
    rf_max_depth: Option<usize>,
    #[arg(long = "bt-rounds")]
    bt_rounds: Option<usize>,
    #[arg(long = "bt-depth")]
    bt_depth: Option<usize>,
    #[arg(long = "bt-rate")]
    bt_rate: Option<f64>,
    #[arg(long = "knn-k")]
    knn_k: Option<usize>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    algo: String,
    /// Training seed (bagging draws etc.)
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    hp: HpArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    dataset: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long)]
    dataset: PathBuf,
    /// Comma-separated algorithm list, default all five
    #[arg(long)]
    algos: Option<String>,
    #[command(flatten)]
    hp: HpArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExportSmvArgs {
    #[arg(long)]
    kripke: PathBuf,
    #[arg(long)]
    formula: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

/// key=value config file; `#` starts a comment line.
struct FileConfig(HashMap<String, String>);

impl FileConfig {
    fn load(path: Option<&PathBuf>) -> Result<Self, String> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or(format!("{}:{}: expected key=value", path.display(), i + 1))?;
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(FileConfig(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| format!("config key `{key}`: cannot parse `{v}`")),
        }
    }
}

fn resolve<T: FromStr + Copy>(
    flag: Option<T>,
    file: &FileConfig,
    key: &str,
    default: T,
) -> Result<T, String> {
    Ok(flag.or(file.get(key)?).unwrap_or(default))
}

fn resolve_hp(args: &HpArgs, file: &FileConfig) -> Result<Hyperparams, String> {
    let d = Hyperparams::default();
    Ok(Hyperparams {
        lr_rate: resolve(args.lr_rate, file, "lr-rate", d.lr_rate)?,
        lr_epochs: resolve(args.lr_epochs, file, "lr-epochs", d.lr_epochs)?,
        lr_l2: resolve(args.lr_l2, file, "lr-l2", d.lr_l2)?,
        dt_max_depth: resolve(args.dt_max_depth, file, "dt-max-depth", d.dt_max_depth)?,
        dt_min_leaf: resolve(args.dt_min_leaf, file, "dt-min-leaf", d.dt_min_leaf)?,
        rf_trees: resolve(args.rf_trees, file, "rf-trees", d.rf_trees)?,
        rf_max_depth: resolve(args.rf_max_depth, file, "rf-max-depth", d.rf_max_depth)?,
        bt_rounds: resolve(args.bt_rounds, file, "bt-rounds", d.bt_rounds)?,
        bt_depth: resolve(args.bt_depth, file, "bt-depth", d.bt_depth)?,
        bt_rate: resolve(args.bt_rate, file, "bt-rate", d.bt_rate)?,
        knn_k: resolve(args.knn_k, file, "knn-k", d.knn_k)?,
    })
}

fn echo_config(pairs: &[(&str, String)]) {
    let rendered: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    println!("config: {}", rendered.join(" "));
}

fn run() -> Result<u8, String> {
    match Cli::parse().command {
        Command::GenData(args) => cmd_gen_data(args),
        Command::Check(args) => cmd_check(args),
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Bench(args) => cmd_bench(args),
        Command::ExportSmv(args) => cmd_export_smv(args),
    }
}

fn experiment_config_from(args: &GenDataArgs, file: &FileConfig) -> Result<ExperimentConfig, String> {
    Ok(ExperimentConfig {
        n_records: resolve(args.records, file, "records", 400)?,
        formula_length: resolve(args.formula_len, file, "formula-len", 500)?,
        gen: GenTemplate {
            n_states: resolve(args.states, file, "states", GenTemplate::standard().n_states)?,
            n_props: resolve(args.props, file, "props", GenTemplate::standard().n_props)?,
            edge_prob: resolve(args.edge_prob, file, "edge-prob", GenTemplate::standard().edge_prob)?,
            label_prob: resolve(args.label_prob, file, "label-prob", GenTemplate::standard().label_prob)?,
        },
        encoding: EncodingConfig {
            max_states: resolve(args.max_states, file, "max-states", EncodingConfig::standard().max_states)?,
            max_props: resolve(args.max_props, file, "max-props", EncodingConfig::standard().max_props)?,
            max_formula_len: resolve(
                args.max_formula_len,
                file,
                "max-formula-len",
                EncodingConfig::standard().max_formula_len,
            )?,
        },
        splits: bench::standard_splits(),
        master_seed: resolve(args.seed, file, "seed", 42)?,
    })
}

fn cmd_gen_data(args: GenDataArgs) -> Result<u8, String> {
    let file = FileConfig::load(args.common.config.as_ref())?;
    let cfg = experiment_config_from(&args, &file)?;
    let jobs = resolve(args.jobs, &file, "jobs", 1)?;
    echo_config(&[
        ("records", cfg.n_records.to_string()),
        ("formula-len", cfg.formula_length.to_string()),
        ("states", cfg.gen.n_states.to_string()),
        ("props", cfg.gen.n_props.to_string()),
        ("edge-prob", cfg.gen.edge_prob.to_string()),
        ("label-prob", cfg.gen.label_prob.to_string()),
        ("max-states", cfg.encoding.max_states.to_string()),
        ("max-props", cfg.encoding.max_props.to_string()),
        ("max-formula-len", cfg.encoding.max_formula_len.to_string()),
        ("seed", cfg.master_seed.to_string()),
        ("jobs", jobs.to_string()),
        ("out", args.out.display().to_string()),
    ]);
    let records = bench::generate_dataset(&cfg, jobs).map_err(|e| e.to_string())?;
    let bytes = bench::dataset_bytes(&records, cfg.encoding.dim());
    fs::write(&args.out, &bytes).map_err(|e| format!("cannot write {}: {e}", args.out.display()))?;
    println!("records: {}", records.len());
    println!("fingerprint: {}", bench::fingerprint(&records));
    Ok(0)
}

fn cmd_check(args: CheckArgs) -> Result<u8, String> {
    echo_config(&[
        ("kripke", args.kripke.display().to_string()),
        ("formula", args.formula.display().to_string()),
    ]);
    let k_text = fs::read_to_string(&args.kripke)
        .map_err(|e| format!("cannot read {}: {e}", args.kripke.display()))?;
    let f_text = fs::read_to_string(&args.formula)
        .map_err(|e| format!("cannot read {}: {e}", args.formula.display()))?;
    let k = kripke::parse(&k_text).map_err(|e| e.to_string())?;
    let phi = ctl::parse(f_text.trim()).map_err(|e| e.to_string())?;
    let result = checker::check(&k, &phi);
    let sat: Vec<String> = result.sat_states.iter().map(|s| s.to_string()).collect();
    println!("verdict: {}", if result.holds { "yes" } else { "no" });
    println!("sat-states: {}", sat.join(","));
    println!("elapsed-ns: {}", result.elapsed_ns);
    Ok(if result.holds { 0 } else { 1 })
}

fn load_dataset(path: &PathBuf) -> Result<(Vec<features::DatasetRecord>, usize), String> {
    let file = fs::File::open(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    features::read_dataset(std::io::BufReader::new(file)).map_err(|e| e.to_string())
}

fn cmd_train(args: TrainArgs) -> Result<u8, String> {
    let file = FileConfig::load(args.common.config.as_ref())?;
    let algo = Algorithm::from_str(&args.algo).map_err(|e| e.to_string())?;
    let seed = resolve(args.seed, &file, "seed", 42)?;
    let hp = resolve_hp(&args.hp, &file)?;
    echo_config(&[
        ("dataset", args.dataset.display().to_string()),
        ("algo", algo.to_string()),
        ("seed", seed.to_string()),
        ("hyperparams", format!("{hp:?}")),
        ("out", args.out.display().to_string()),
    ]);
    let (records, _d) = load_dataset(&args.dataset)?;
    let model = ml::train(algo, &records, &hp, seed).map_err(|e| e.to_string())?;
    let text = model.to_text().map_err(|e| e.to_string())?;
    fs::write(&args.out, text).map_err(|e| format!("cannot write {}: {e}", args.out.display()))?;
    println!("trained: {} on {} records", algo, records.len());
    Ok(0)
}

fn cmd_eval(args: EvalArgs) -> Result<u8, String> {
    echo_config(&[
        ("model", args.model.display().to_string()),
        ("dataset", args.dataset.display().to_string()),
    ]);
    let text = fs::read_to_string(&args.model)
        .map_err(|e| format!("cannot read {}: {e}", args.model.display()))?;
    let model = TrainedModel::from_text(&text).map_err(|e| e.to_string())?;
    let (records, _d) = load_dataset(&args.dataset)?;
    let report = ml::evaluate(&model, &records).map_err(|e| e.to_string())?;
    println!("algorithm: {}", model.algorithm);
    println!("accuracy: {}", report.accuracy);
    println!("mean-predict-ns: {}", report.mean_predict_ns);
    println!("n-test: {}", report.n_test);
    Ok(0)
}

fn cmd_bench(args: BenchArgs) -> Result<u8, String> {
    let file = FileConfig::load(args.common.config.as_ref())?;
    let algos: Vec<Algorithm> = match args.algos.or(file.get("algos")?) {
        None => Algorithm::ALL.to_vec(),
        Some(list) => list
            .split(',')
            .map(|s| Algorithm::from_str(s.trim()).map_err(|e| e.to_string()))
            .collect::<Result<_, String>>()?,
    };
    let hp = resolve_hp(&args.hp, &file)?;
    let (records, d) = load_dataset(&args.dataset)?;
    // splits and caps follow the standard experiment; the formula cap is
    // widened to the dataset dimension when a nonstandard d is loaded
    let mut cfg = ExperimentConfig::standard(records.len(), 1, 0);
    let std_fixed = cfg.encoding.dim() - cfg.encoding.max_formula_len;
    if d >= std_fixed {
        cfg.encoding.max_formula_len = d - std_fixed;
    }
    let algo_names: Vec<&str> = algos.iter().map(|a| a.name()).collect();
    echo_config(&[
        ("dataset", args.dataset.display().to_string()),
        ("algos", algo_names.join(",")),
        ("hyperparams", format!("{hp:?}")),
        ("out", args.out.display().to_string()),
    ]);
    let report = bench::run_benchmark(&records, &cfg, &algos, &hp).map_err(|e| e.to_string())?;
    let csv = report.to_csv();
    fs::write(&args.out, &csv).map_err(|e| format!("cannot write {}: {e}", args.out.display()))?;
    print!("{csv}");
    Ok(0)
}

fn cmd_export_smv(args: ExportSmvArgs) -> Result<u8, String> {
    echo_config(&[
        ("kripke", args.kripke.display().to_string()),
        ("formula", args.formula.display().to_string()),
        ("out", args.out.display().to_string()),
    ]);
    let k_text = fs::read_to_string(&args.kripke)
        .map_err(|e| format!("cannot read {}: {e}", args.kripke.display()))?;
    let f_text = fs::read_to_string(&args.formula)
        .map_err(|e| format!("cannot read {}: {e}", args.formula.display()))?;
    let k = kripke::parse(&k_text).map_err(|e| e.to_string())?;
    let phi = ctl::parse(f_text.trim()).map_err(|e| e.to_string())?;
    let smv = kripke::export_smv(&k, &phi);
    fs::write(&args.out, &smv).map_err(|e| format!("cannot write {}: {e}", args.out.display()))?;
    println!("wrote {}", args.out.display());
    Ok(0)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
