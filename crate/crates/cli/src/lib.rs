//! The `fedscreen` command line.
//!
//! Every subcommand is also a plain function in [`commands`], so tests can
//! drive the pipeline without spawning processes.
//!
//! Exit codes: 0 on success, 2 for bad input or configuration, 3 when
//! training diverges.

pub mod commands;
pub mod spec;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fedscreen::federation::{Aggregation, FederationConfig};
use fedscreen::models::{ModelKind, TrainConfig};

use commands::{MergeOpts, PreprocessOpts, SweepOpts, TrainOpts};
use spec::{ExperimentSpec, Stage, SweepSpec};

/// Environment variable holding the `env_logger` filter.
pub const LOG_ENV: &str = "FEDSCREEN_LOG";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] fedscreen::Error),
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_divergence() => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fedscreen", version, about = "Federated autism-screening experiments")]
pub struct Cli {
    /// Experiment file; its tables supply defaults that flags override.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Drop incomplete rows and encode categorical columns.
    Preprocess {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "class")]
        label: String,
        /// Column to remove before cleaning; repeatable.
        #[arg(long)]
        drop: Vec<String>,
    },
    /// Turn a landmark file into brow, eye and nose-to-lips distances.
    Extract {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pair behavioral rows with facial distances of the same class.
    Merge {
        #[arg(long)]
        behavioral: PathBuf,
        #[arg(long)]
        distances: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Synthesize this many class-balanced behavioral rows before merging.
        #[arg(long)]
        synthesize: Option<usize>,
    },
    /// Centralized training with a hold-out split or k-fold cross-validation.
    Train {
        #[arg(long)]
        data: Option<PathBuf>,
        /// Metrics CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        kfold: Option<usize>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Federated runs over a list of client counts.
    Fedsweep {
        #[arg(long)]
        data: Option<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated client counts.
        #[arg(long, value_delimiter = ',')]
        clients: Option<Vec<usize>>,
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long, value_enum)]
        aggregation: Option<AggregationArg>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Run every stage of the experiment file given with --config.
    Run {
        #[arg(long)]
        seed: Option<u64>,
        /// Replaces the file's out_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum AggregationArg {
    Uniform,
    SizeWeighted,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// logistic, mlp, tree or knn.
    #[arg(long)]
    pub model: Option<ModelKind>,
    /// Training epochs (local epochs per round when federated).
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub no_standardize: bool,
}

impl ModelArgs {
    fn apply(&self, cfg: &mut TrainConfig) {
        if let Some(m) = self.model {
            cfg.model_kind = m;
        }
        if let Some(e) = self.epochs {
            cfg.epochs = e;
        }
        if let Some(lr) = self.lr {
            cfg.learning_rate = lr;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
    }
}

fn required(p: Option<PathBuf>, flag: &str) -> Result<PathBuf, CliError> {
    p.ok_or_else(|| CliError::Config(format!("--{flag} is required without --config")))
}

fn load_spec(config: Option<&Path>) -> Result<Option<ExperimentSpec>, CliError> {
    config.map(ExperimentSpec::load).transpose()
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let spec = load_spec(cli.config.as_deref())?;
    match cli.command {
        Command::Preprocess { input, out, label, drop } => {
            commands::cmd_preprocess(&PreprocessOpts { input, out, label, drop })?;
        }
        Command::Extract { input, out } => {
            commands::cmd_extract(&input, &out)?;
        }
        Command::Merge { behavioral, distances, out, seed, synthesize } => {
            commands::cmd_merge(&MergeOpts { behavioral, distances, out, seed, synthesize })?;
        }
        Command::Train { data, out, kfold, model } => {
            let mut opts = match &spec {
                Some(s) => train_opts(s)?,
                None => TrainOpts {
                    data: required(data.clone(), "data")?,
                    out: required(out.clone(), "out")?,
                    cfg: TrainConfig::default(),
                    kfold: None,
                    standardize: true,
                    train_fraction: 0.8,
                },
            };
            opts.data = data.unwrap_or(opts.data);
            opts.out = out.unwrap_or(opts.out);
            opts.kfold = kfold.or(opts.kfold);
            opts.standardize &= !model.no_standardize;
            model.apply(&mut opts.cfg);
            commands::cmd_train(&opts)?;
        }
        Command::Fedsweep { data, out, clients, rounds, aggregation, model } => {
            let mut opts = match &spec {
                Some(s) => sweep_opts(s)?,
                None => sweep_opts_from(
                    &SweepSpec::default(),
                    required(data.clone(), "data")?,
                    required(out.clone(), "out")?,
                    0,
                ),
            };
            opts.data = data.unwrap_or(opts.data);
            opts.out_dir = out.unwrap_or(opts.out_dir);
            opts.clients = clients.unwrap_or(opts.clients);
            opts.fed.rounds = rounds.unwrap_or(opts.fed.rounds);
            if let Some(a) = aggregation {
                opts.fed.aggregation = match a {
                    AggregationArg::Uniform => Aggregation::Uniform,
                    AggregationArg::SizeWeighted => Aggregation::SizeWeighted,
                };
            }
            opts.standardize &= !model.no_standardize;
            model.apply(&mut opts.fed.train_cfg);
            opts.fed.epochs_per_round = opts.fed.train_cfg.epochs;
            opts.fed.seed = opts.fed.train_cfg.seed;
            commands::cmd_fedsweep(&opts)?;
        }
        Command::Run { seed, out } => {
            let mut s = spec.ok_or_else(|| CliError::Config("run needs --config".into()))?;
            if let Some(seed) = seed {
                s.seed = seed;
            }
            if let Some(out) = out {
                s.out_dir = std::path::absolute(out)
                    .map_err(|e| CliError::Config(e.to_string()))?;
            }
            run_experiment(&s)?;
        }
    }
    Ok(())
}

fn train_opts(s: &ExperimentSpec) -> Result<TrainOpts, CliError> {
    let t = s.train.clone().unwrap_or_default();
    let mut cfg = t.model.clone();
    cfg.seed = s.seed;
    Ok(TrainOpts {
        data: s.data_for(Stage::Train, t.data.as_deref())?,
        out: s.output(&t.output),
        cfg,
        kfold: t.kfold,
        standardize: t.standardize,
        train_fraction: t.train_fraction,
    })
}

fn sweep_opts(s: &ExperimentSpec) -> Result<SweepOpts, CliError> {
    let sw = s.fedsweep.clone().unwrap_or_default();
    let data = s.data_for(Stage::Fedsweep, sw.data.as_deref())?;
    Ok(sweep_opts_from(&sw, data, s.output(&sw.output), s.seed))
}

fn sweep_opts_from(sw: &SweepSpec, data: PathBuf, out_dir: PathBuf, seed: u64) -> SweepOpts {
    let mut train_cfg = sw.model.clone();
    train_cfg.seed = seed;
    SweepOpts {
        data,
        out_dir,
        clients: sw.clients.clone(),
        fed: FederationConfig {
            n_clients: 1,
            rounds: sw.rounds,
            epochs_per_round: train_cfg.epochs,
            selector: sw.selector,
            aggregation: sw.aggregation,
            train_fraction: sw.train_fraction,
            partitioning: sw.partitioning,
            train_cfg,
            seed,
        },
        standardize: sw.standardize,
    }
}

/// Run every listed stage in order.
pub fn run_experiment(s: &ExperimentSpec) -> Result<(), CliError> {
    s.validate()?;
    for &stage in &s.stages {
        log::info!("stage {}", spec::stage_name(stage));
        match stage {
            Stage::Preprocess => {
                let p = s.preprocess.as_ref().expect("validated");
                commands::cmd_preprocess(&PreprocessOpts {
                    input: s.input(&p.input),
                    out: s.output(&p.output),
                    label: p.label.clone(),
                    drop: p.drop.clone(),
                })?;
            }
            Stage::Extract => {
                let e = s.extract.as_ref().expect("validated");
                commands::cmd_extract(&s.input(&e.input), &s.output(&e.output))?;
            }
            Stage::Merge => {
                let m = s.merge.as_ref().expect("validated");
                let (behavioral, distances) = s.merge_inputs(m)?;
                commands::cmd_merge(&MergeOpts {
                    behavioral,
                    distances,
                    out: s.output(&m.output),
                    seed: s.seed,
                    synthesize: m.synthesize,
                })?;
            }
            Stage::Train => {
                commands::cmd_train(&train_opts(s)?)?;
            }
            Stage::Fedsweep => {
                commands::cmd_fedsweep(&sweep_opts(s)?)?;
            }
        }
    }
    Ok(())
}
