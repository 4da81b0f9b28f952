use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fedscreen::data::{
    drop_missing, encode_categorical, kfold_plan, load_csv, merge_datasets, read_dataset_csv,
    sidecar_path, synthesize_behavioral, train_test_split, write_atomic, write_dataset_csv,
    Dataset, Schema, SplitPair,
};
use fedscreen::federation::{rounds_to_csv, run_federation, FederationConfig, RoundMetrics};
use fedscreen::landmarks::{
    distances_dataset, distances_to_csv, extract_all, parse_landmarks, read_distances_csv,
    DISTANCE_CSV_HEADER,
};
use fedscreen::models::{evaluate, EvalReport, Model, Standardizer, TrainConfig};
use fedscreen::seed;
use rayon::prelude::*;

use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

/// Read a dataset CSV, taking the label column from its schema sidecar when
/// present. Distance CSVs from `extract` load as their three distance features.
pub fn read_processed(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if text.lines().next() == Some(DISTANCE_CSV_HEADER) {
        return Ok(distances_dataset(&read_distances_csv(path)?)?);
    }
    let sidecar = sidecar_path(path);
    let label = if sidecar.exists() {
        let text = std::fs::read_to_string(&sidecar)
            .map_err(|e| CliError::Config(format!("{}: {e}", sidecar.display())))?;
        Schema::from_json(&text)?.label_column
    } else {
        "class".to_string()
    };
    Ok(read_dataset_csv(path, &label)?)
}

#[derive(Debug, Clone)]
pub struct PreprocessOpts {
    pub input: PathBuf,
    pub out: PathBuf,
    pub label: String,
    pub drop: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreprocessReport {
    pub rows_before: usize,
    pub rows_after: usize,
    pub n_features: usize,
}

/// Load, drop incomplete rows, encode categories, write CSV plus schema.
pub fn cmd_preprocess(o: &PreprocessOpts) -> Result<PreprocessReport> {
    let raw = load_csv(&o.input, &o.label)?;
    let drop: Vec<&str> = o.drop.iter().map(String::as_str).collect();
    let raw = raw.drop_columns(&drop)?;
    let clean = drop_missing(&raw);
    let d = encode_categorical(&clean)?;
    write_dataset_csv(&d, &o.out)?;
    let report = PreprocessReport {
        rows_before: raw.n_rows(),
        rows_after: d.n_rows(),
        n_features: d.n_features(),
    };
    println!(
        "{}: {} \u{2192} {} rows, {} features",
        o.input.display(),
        report.rows_before,
        report.rows_after,
        report.n_features
    );
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractReport {
    pub records: usize,
    pub extracted: usize,
    pub skipped: usize,
}

pub fn cmd_extract(input: &Path, out: &Path) -> Result<ExtractReport> {
    let file = parse_landmarks(input)?;
    let rows = extract_all(&file.sets);
    write_atomic(out, distances_to_csv(&rows).as_bytes())?;
    let report = ExtractReport {
        records: file.sets.len() + file.skipped.len(),
        extracted: rows.len(),
        skipped: file.skipped.len(),
    };
    if report.skipped > 0 {
        log::warn!("skipped {} of {} landmark records", report.skipped, report.records);
    }
    println!(
        "{}: {} records, {} extracted, {} skipped",
        input.display(),
        report.records,
        report.extracted,
        report.skipped
    );
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct MergeOpts {
    pub behavioral: PathBuf,
    pub distances: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
    pub synthesize: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MergeReport {
    pub rows: usize,
    pub n_features: usize,
}

pub fn cmd_merge(o: &MergeOpts) -> Result<MergeReport> {
    let mut behavioral = read_processed(&o.behavioral)?;
    if let Some(n) = o.synthesize {
        behavioral = synthesize_behavioral(&behavioral, n, seed::derive(o.seed, "synthesize", 0))?;
    }
    let distances = read_distances_csv(&o.distances)?;
    let merged = merge_datasets(&behavioral, &distances, o.seed)?;
    write_dataset_csv(&merged, &o.out)?;
    let report = MergeReport {
        rows: merged.n_rows(),
        n_features: merged.n_features(),
    };
    println!("merged {} rows with {} features", report.rows, report.n_features);
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct TrainOpts {
    pub data: PathBuf,
    pub out: PathBuf,
    pub cfg: TrainConfig,
    pub kfold: Option<usize>,
    pub standardize: bool,
    pub train_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// One report per fold, or a single hold-out report.
    pub folds: Vec<EvalReport>,
    pub mean_accuracy: f64,
}

/// Standardize every feature over the whole dataset. Done identically for
/// centralized and federated runs so the two see the same inputs.
fn prepare(d: Dataset, standardize: bool) -> Result<Dataset> {
    if !standardize {
        return Ok(d);
    }
    Ok(Standardizer::fit(d.features())?.apply(&d)?)
}

fn fit_and_score(split: &SplitPair, cfg: &TrainConfig) -> Result<EvalReport> {
    let model = Model::fit(&split.train, cfg)?;
    Ok(evaluate(&model, &split.test)?)
}

/// Centralized training with a seeded hold-out split or k-fold cross-validation.
pub fn cmd_train(o: &TrainOpts) -> Result<TrainReport> {
    o.cfg.validate()?;
    let d = prepare(read_processed(&o.data)?, o.standardize)?;
    let folds = match o.kfold {
        Some(k) => {
            let plan = kfold_plan(d.n_rows(), k, true, o.cfg.seed)?;
            (0..k)
                .map(|f| fit_and_score(&plan.split(&d, f)?, &o.cfg))
                .collect::<Result<Vec<_>>>()?
        }
        None => vec![fit_and_score(&train_test_split(&d, o.train_fraction, o.cfg.seed)?, &o.cfg)?],
    };
    let mean_accuracy = folds.iter().map(|r| r.accuracy).sum::<f64>() / folds.len() as f64;
    let mean_loss = folds.iter().map(|r| r.loss).sum::<f64>() / folds.len() as f64;

    let mut csv = String::from("fold,accuracy,loss,n_test,n_correct\n");
    let name = |i: usize| if o.kfold.is_some() { (i + 1).to_string() } else { "holdout".into() };
    for (i, r) in folds.iter().enumerate() {
        writeln!(csv, "{},{},{},{},{}", name(i), r.accuracy, r.loss, r.n_test, r.n_correct).unwrap();
    }
    if o.kfold.is_some() {
        writeln!(csv, "mean,{mean_accuracy},{mean_loss},,").unwrap();
    }
    write_atomic(&o.out, csv.as_bytes())?;

    match o.kfold {
        Some(k) => println!("{}: {k}-fold mean accuracy {mean_accuracy:.4}", o.cfg.model_kind),
        None => println!("{}: hold-out accuracy {mean_accuracy:.4}", o.cfg.model_kind),
    }
    Ok(TrainReport { folds, mean_accuracy })
}

#[derive(Debug, Clone)]
pub struct SweepOpts {
    pub data: PathBuf,
    pub out_dir: PathBuf,
    pub clients: Vec<usize>,
    /// Template; `n_clients` is replaced per sweep point.
    pub fed: FederationConfig,
    pub standardize: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub clients: usize,
    /// Largest shard size.
    pub data_per_client: usize,
    /// Largest local training split.
    pub train_per_client: usize,
    /// Global accuracy of the last round.
    pub global_accuracy: f64,
    pub rounds: Vec<RoundMetrics>,
}

pub const SWEEP_FILE: &str = "sweep.csv";

pub fn rounds_file(clients: usize) -> String {
    format!("rounds_c{clients}.csv")
}

pub fn messages_file(clients: usize) -> String {
    format!("messages_c{clients}.jsonl")
}

/// One federated run per client count.
///
/// Writes `sweep.csv` (one row per client count, ascending), and per count
/// the round metrics and the aggregator-bound messages.
pub fn cmd_fedsweep(o: &SweepOpts) -> Result<Vec<SweepPoint>> {
    crate::spec::validate_sweep(&o.clients)?;
    let d = prepare(read_processed(&o.data)?, o.standardize)?;
    std::fs::create_dir_all(&o.out_dir)
        .map_err(|e| CliError::Config(format!("{}: {e}", o.out_dir.display())))?;
    let mut clients = o.clients.clone();
    clients.sort_unstable();

    let points = clients
        .par_iter()
        .map(|&c| {
            let cfg = FederationConfig {
                n_clients: c,
                ..o.fed.clone()
            };
            let run = run_federation(&d, &cfg)?;
            write_atomic(&o.out_dir.join(rounds_file(c)), rounds_to_csv(&run.rounds).as_bytes())?;
            let mut messages = run.transcript.join("\n");
            messages.push('\n');
            write_atomic(&o.out_dir.join(messages_file(c)), messages.as_bytes())?;
            let point = SweepPoint {
                clients: c,
                data_per_client: run.shard_sizes.iter().copied().max().unwrap_or(0),
                train_per_client: run.train_sizes.iter().copied().max().unwrap_or(0),
                global_accuracy: run.rounds.last().map_or(0.0, |r| r.global_accuracy),
                rounds: run.rounds,
            };
            log::info!(
                "C={c}: data per client {}, global accuracy {:.4}",
                point.data_per_client,
                point.global_accuracy
            );
            Ok(point)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut csv = String::from("clients,data_per_client,train_per_client,global_accuracy\n");
    for p in &points {
        writeln!(
            csv,
            "{},{},{},{}",
            p.clients, p.data_per_client, p.train_per_client, p.global_accuracy
        )
        .unwrap();
        println!(
            "C={:<4} data/client {:<5} global accuracy {:.4}",
            p.clients, p.data_per_client, p.global_accuracy
        );
    }
    write_atomic(&o.out_dir.join(SWEEP_FILE), csv.as_bytes())?;
    Ok(points)
}
