//! Declarative experiment files.
//!
//! An experiment is a TOML file listing the stages to run and one table per
//! stage. Input paths are relative to the file's directory; outputs land in
//! `out_dir`, itself relative to the file. A stage that needs data and names
//! none consumes the output of the latest earlier data stage.
//!
//! ```toml
//! seed = 7
//! out_dir = "../out/behavioral"
//! stages = ["preprocess", "train", "fedsweep"]
//!
//! [preprocess]
//! input = "../fixtures/behavioral_705.csv"
//! label = "Class/ASD"
//! drop = ["id"]
//!
//! [train]
//! kfold = 8
//!
//! [fedsweep]
//! clients = [50, 10, 3]
//! ```

use std::path::{Path, PathBuf};

use fedscreen::federation::{Aggregation, Selector};
use fedscreen::data::Partitioning;
use fedscreen::models::TrainConfig;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Preprocess,
    Extract,
    Merge,
    Train,
    Fedsweep,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub seed: u64,
    pub out_dir: PathBuf,
    pub stages: Vec<Stage>,
    pub preprocess: Option<PreprocessSpec>,
    pub extract: Option<ExtractSpec>,
    pub merge: Option<MergeSpec>,
    pub train: Option<TrainSpec>,
    pub fedsweep: Option<SweepSpec>,
    /// Directory of the experiment file; set on load.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreprocessSpec {
    pub input: PathBuf,
    #[serde(default = "default_label")]
    pub label: String,
    #[serde(default)]
    pub drop: Vec<String>,
    #[serde(default = "PreprocessSpec::default_output")]
    pub output: PathBuf,
}

impl PreprocessSpec {
    fn default_output() -> PathBuf {
        "processed.csv".into()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractSpec {
    pub input: PathBuf,
    #[serde(default = "ExtractSpec::default_output")]
    pub output: PathBuf,
}

impl ExtractSpec {
    fn default_output() -> PathBuf {
        "distances.csv".into()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MergeSpec {
    pub behavioral: Option<PathBuf>,
    pub distances: Option<PathBuf>,
    /// Replace the behavioral rows with this many class-balanced synthetic rows first.
    pub synthesize: Option<usize>,
    #[serde(default = "MergeSpec::default_output")]
    pub output: PathBuf,
}

impl MergeSpec {
    fn default_output() -> PathBuf {
        "merged.csv".into()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSpec {
    pub data: Option<PathBuf>,
    pub kfold: Option<usize>,
    #[serde(default = "default_true")]
    pub standardize: bool,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    #[serde(default)]
    pub model: TrainConfig,
    #[serde(default = "TrainSpec::default_output")]
    pub output: PathBuf,
}

impl TrainSpec {
    fn default_output() -> PathBuf {
        "metrics.csv".into()
    }
}

impl Default for TrainSpec {
    fn default() -> Self {
        TrainSpec {
            data: None,
            kfold: None,
            standardize: true,
            train_fraction: default_train_fraction(),
            model: TrainConfig::default(),
            output: TrainSpec::default_output(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub data: Option<PathBuf>,
    #[serde(default = "SweepSpec::default_clients")]
    pub clients: Vec<usize>,
    #[serde(default = "default_one")]
    pub rounds: usize,
    #[serde(default)]
    pub selector: Selector,
    #[serde(default)]
    pub aggregation: Aggregation,
    #[serde(default)]
    pub partitioning: Partitioning,
    #[serde(default = "default_true")]
    pub standardize: bool,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    /// `model.epochs` is the number of local epochs per round.
    #[serde(default)]
    pub model: TrainConfig,
    #[serde(default = "SweepSpec::default_output")]
    pub output: PathBuf,
}

impl SweepSpec {
    fn default_clients() -> Vec<usize> {
        vec![50, 10, 3]
    }

    fn default_output() -> PathBuf {
        "sweep".into()
    }
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            data: None,
            clients: SweepSpec::default_clients(),
            rounds: 1,
            selector: Selector::All,
            aggregation: Aggregation::Uniform,
            partitioning: Partitioning::Iid,
            standardize: true,
            train_fraction: default_train_fraction(),
            model: TrainConfig::default(),
            output: SweepSpec::default_output(),
        }
    }
}

fn default_label() -> String {
    "class".into()
}

fn default_true() -> bool {
    true
}

fn default_one() -> usize {
    1
}

fn default_train_fraction() -> f64 {
    0.8
}

impl ExperimentSpec {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut spec: ExperimentSpec = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        spec.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(spec)
    }

    /// An input path as written in the file, resolved against its directory.
    pub fn input(&self, p: &Path) -> PathBuf {
        self.base_dir.join(p)
    }

    pub fn output(&self, p: &Path) -> PathBuf {
        self.base_dir.join(&self.out_dir).join(p)
    }

    fn produced_before(&self, stage: Stage) -> Option<PathBuf> {
        let pos = self.stages.iter().position(|s| *s == stage)?;
        self.stages[..pos].iter().rev().find_map(|s| match s {
            Stage::Merge => self.merge.as_ref().map(|m| self.output(&m.output)),
            Stage::Preprocess => self.preprocess.as_ref().map(|p| self.output(&p.output)),
            Stage::Extract => self.extract.as_ref().map(|e| self.output(&e.output)),
            _ => None,
        })
    }

    fn produced_by(&self, stage: Stage) -> Option<PathBuf> {
        if !self.stages.contains(&stage) {
            return None;
        }
        match stage {
            Stage::Preprocess => self.preprocess.as_ref().map(|p| self.output(&p.output)),
            Stage::Extract => self.extract.as_ref().map(|e| self.output(&e.output)),
            _ => None,
        }
    }

    /// Data consumed by `train` or `fedsweep`.
    pub fn data_for(&self, stage: Stage, explicit: Option<&Path>) -> Result<PathBuf, CliError> {
        match explicit {
            Some(p) => Ok(self.input(p)),
            None => self.produced_before(stage).ok_or_else(|| {
                CliError::Config(format!("{stage:?} names no data and no earlier stage produces any"))
            }),
        }
    }

    pub fn merge_inputs(&self, m: &MergeSpec) -> Result<(PathBuf, PathBuf), CliError> {
        let pick = |explicit: &Option<PathBuf>, from: Stage, what: &str| match explicit {
            Some(p) => Ok(self.input(p)),
            None => self
                .produced_by(from)
                .ok_or_else(|| CliError::Config(format!("merge names no {what} input"))),
        };
        Ok((
            pick(&m.behavioral, Stage::Preprocess, "behavioral")?,
            pick(&m.distances, Stage::Extract, "distances")?,
        ))
    }

    /// Check stage tables, sweep values and that every external input exists.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.stages.is_empty() {
            return Err(CliError::Config("no stages listed".into()));
        }
        let mut inputs: Vec<PathBuf> = Vec::new();
        for &stage in &self.stages {
            let missing = || CliError::Config(format!("stage {stage:?} has no [{}] table", stage_name(stage)));
            match stage {
                Stage::Preprocess => inputs.push(self.input(&self.preprocess.as_ref().ok_or_else(missing)?.input)),
                Stage::Extract => inputs.push(self.input(&self.extract.as_ref().ok_or_else(missing)?.input)),
                Stage::Merge => {
                    let m = self.merge.as_ref().ok_or_else(missing)?;
                    let (b, d) = self.merge_inputs(m)?;
                    inputs.extend(m.behavioral.as_ref().map(|_| b));
                    inputs.extend(m.distances.as_ref().map(|_| d));
                }
                Stage::Train => {
                    let t = self.train.clone().unwrap_or_default();
                    let data = self.data_for(stage, t.data.as_deref())?;
                    if t.data.is_some() {
                        inputs.push(data);
                    }
                    t.model.validate()?;
                }
                Stage::Fedsweep => {
                    let s = self.fedsweep.clone().unwrap_or_default();
                    let data = self.data_for(stage, s.data.as_deref())?;
                    if s.data.is_some() {
                        inputs.push(data);
                    }
                    validate_sweep(&s.clients)?;
                }
            }
        }
        for p in inputs {
            if !p.exists() {
                return Err(CliError::Config(format!("input {} does not exist", p.display())));
            }
        }
        Ok(())
    }
}

pub fn stage_name(stage: Stage) -> &'static str {
    match stage {
        Stage::Preprocess => "preprocess",
        Stage::Extract => "extract",
        Stage::Merge => "merge",
        Stage::Train => "train",
        Stage::Fedsweep => "fedsweep",
    }
}

/// Sweep values must be positive and distinct.
pub fn validate_sweep(clients: &[usize]) -> Result<(), CliError> {
    if clients.is_empty() {
        return Err(CliError::Config("sweep lists no client counts".into()));
    }
    if clients.contains(&0) {
        return Err(CliError::Config("client counts must be positive".into()));
    }
    let mut sorted = clients.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != clients.len() {
        return Err(CliError::Config(format!("client counts repeat: {clients:?}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn experiment(name: &str) -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../experiments").join(name)
    }

    #[test]
    fn shipped_experiments_validate() {
        for name in ["behavioral.toml", "facial.toml", "merged.toml"] {
            let s = ExperimentSpec::load(&experiment(name)).unwrap();
            s.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn later_stages_consume_earlier_outputs() {
        let s = ExperimentSpec::load(&experiment("merged.toml")).unwrap();
        let merged = s.output(Path::new("merged.csv"));
        assert_eq!(s.data_for(Stage::Train, None).unwrap(), merged);
        assert_eq!(s.data_for(Stage::Fedsweep, None).unwrap(), merged);
        let (b, d) = s.merge_inputs(s.merge.as_ref().unwrap()).unwrap();
        assert_eq!(b, s.output(Path::new("processed.csv")));
        assert_eq!(d, s.output(Path::new("distances.csv")));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<ExperimentSpec>("out_dir = \"o\"\nstages = []\nseeed = 3\n").unwrap_err();
        assert!(err.to_string().contains("seeed"));
    }

    #[test]
    fn train_without_data_source_fails() {
        let mut s: ExperimentSpec = toml::from_str("out_dir = \"o\"\nstages = [\"train\"]\n").unwrap();
        s.base_dir = PathBuf::from(".");
        assert!(s.validate().is_err());
    }

    #[test]
    fn sweep_values() {
        assert!(validate_sweep(&[50, 10, 3]).is_ok());
        assert!(validate_sweep(&[]).is_err());
        assert!(validate_sweep(&[3, 0]).is_err());
        assert!(validate_sweep(&[3, 10, 3]).is_err());
    }
}
