//! From-scratch classifiers with a shared predict/evaluate contract.
//!
//! Logistic regression and the one-hidden-layer network are parametric:
//! their [`ModelParams`] are what clients send to the aggregator. The
//! decision tree and k-NN are non-parametric and only run centrally.
//!
//! All probabilistic outputs are the probability of class 1 (non-ASD); a
//! row is predicted as class 1 when that probability is at least
//! [`THRESHOLD`].

mod knn;
mod logistic;
mod loss;
mod mlp;
mod params;
mod scale;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Matrix};
use crate::{Error, Result};

pub use knn::{knn_predict, KnnModel};
pub use logistic::{
    logistic_fit, logistic_fit_traced, logistic_loss_and_gradient, logistic_predict,
    LogisticModel,
};
pub use loss::{bce_loss, sigmoid, EPS};
pub use mlp::{mlp_fit, mlp_loss_and_gradient, mlp_predict, MlpModel};
pub use params::{ModelParams, ShapeTag, PARAMS_DOC_VERSION};
pub(crate) use params::ParamsDocument;
pub use scale::Standardizer;
pub use tree::{tree_fit, tree_predict, DecisionTree};

/// Decision threshold on the class-1 probability.
pub const THRESHOLD: f64 = 0.5;

/// Class chosen when votes or leaf counts tie: ASD, erring toward a positive screen.
pub const TIE_CLASS: u8 = crate::data::ASD;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Logistic,
    Mlp,
    Tree,
    Knn,
}

impl ModelKind {
    pub fn is_parametric(self) -> bool {
        matches!(self, ModelKind::Logistic | ModelKind::Mlp)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Logistic => "logistic",
            ModelKind::Mlp => "mlp",
            ModelKind::Tree => "tree",
            ModelKind::Knn => "knn",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "logistic" | "lr" => Ok(ModelKind::Logistic),
            "mlp" | "nn" => Ok(ModelKind::Mlp),
            "tree" | "dt" => Ok(ModelKind::Tree),
            "knn" => Ok(ModelKind::Knn),
            other => Err(Error::InvalidConfig(format!("unknown model kind `{other}`"))),
        }
    }
}

/// Training hyperparameters for every model kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub model_kind: ModelKind,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Hidden units of the network.
    pub hidden_width: usize,
    /// Tree depth cap; `None` grows until leaves are pure.
    pub max_depth: Option<usize>,
    /// Neighbors for k-NN.
    pub k: usize,
}

impl TrainConfig {
    pub fn new(model_kind: ModelKind) -> Self {
        TrainConfig {
            model_kind,
            ..TrainConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.model_kind == ModelKind::Mlp && self.hidden_width == 0 {
            return Err(Error::InvalidConfig("hidden width must be at least 1".into()));
        }
        if self.model_kind == ModelKind::Knn && self.k.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!("k must be odd, got {}", self.k)));
        }
        Ok(())
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            model_kind: ModelKind::Logistic,
            epochs: 20,
            learning_rate: 0.1,
            seed: 0,
            hidden_width: 16,
            max_depth: None,
            k: 3,
        }
    }
}

pub trait Predictor {
    /// Probability of class 1 per row. Hard classifiers return 0.0 or 1.0.
    fn predict_proba(&self, rows: &Matrix) -> Result<Vec<f64>>;

    /// Whether [`predict_proba`](Self::predict_proba) is a real probability.
    fn is_probabilistic(&self) -> bool {
        true
    }

    fn predict(&self, rows: &Matrix) -> Result<Vec<u8>> {
        Ok(self
            .predict_proba(rows)?
            .into_iter()
            .map(|p| u8::from(p >= THRESHOLD))
            .collect())
    }
}

/// Adapts a closure returning hard class codes.
pub struct FnPredictor<F>(pub F);

impl<F: Fn(&Matrix) -> Vec<u8>> Predictor for FnPredictor<F> {
    fn predict_proba(&self, rows: &Matrix) -> Result<Vec<f64>> {
        Ok((self.0)(rows).into_iter().map(f64::from).collect())
    }

    fn is_probabilistic(&self) -> bool {
        false
    }
}

/// Any fitted model.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Logistic(LogisticModel),
    Mlp(MlpModel),
    Tree(DecisionTree),
    Knn(KnnModel),
}

impl Model {
    /// Fit `cfg.model_kind` on `train`: logistic from zeros, the network from seeded weights.
    pub fn fit(train: &Dataset, cfg: &TrainConfig) -> Result<Model> {
        cfg.validate()?;
        Ok(match cfg.model_kind {
            ModelKind::Logistic => Model::Logistic(LogisticModel::fit(train, cfg)?),
            ModelKind::Mlp => Model::Mlp(MlpModel::fit(train, cfg)?),
            ModelKind::Tree => Model::Tree(tree_fit(train, cfg)?),
            ModelKind::Knn => Model::Knn(KnnModel::new(train.clone(), cfg.k)?),
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Logistic(_) => ModelKind::Logistic,
            Model::Mlp(_) => ModelKind::Mlp,
            Model::Tree(_) => ModelKind::Tree,
            Model::Knn(_) => ModelKind::Knn,
        }
    }

    pub fn params(&self) -> Option<&ModelParams> {
        match self {
            Model::Logistic(m) => Some(&m.params),
            Model::Mlp(m) => Some(&m.params),
            _ => None,
        }
    }

    /// Replace the parameters of a parametric model.
    pub fn set_params(&mut self, params: ModelParams) -> Result<()> {
        let slot = match self {
            Model::Logistic(m) => &mut m.params,
            Model::Mlp(m) => &mut m.params,
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "{} has no exchangeable parameters",
                    self.kind()
                )))
            }
        };
        if slot.shape() != params.shape() {
            return Err(Error::ShapeMismatch {
                expected: format!("{:?}", slot.shape()),
                found: format!("{:?}", params.shape()),
            });
        }
        *slot = params;
        Ok(())
    }

    fn as_predictor(&self) -> &dyn Predictor {
        match self {
            Model::Logistic(m) => m,
            Model::Mlp(m) => m,
            Model::Tree(m) => m,
            Model::Knn(m) => m,
        }
    }
}

impl Predictor for Model {
    fn predict_proba(&self, rows: &Matrix) -> Result<Vec<f64>> {
        self.as_predictor().predict_proba(rows)
    }

    fn is_probabilistic(&self) -> bool {
        self.as_predictor().is_probabilistic()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    /// BCE for probabilistic models, 0-1 loss otherwise.
    pub loss: f64,
    pub n_test: usize,
    pub n_correct: usize,
}

pub fn evaluate(predictor: &(impl Predictor + ?Sized), test: &Dataset) -> Result<EvalReport> {
    if test.is_empty() {
        return Err(Error::Empty("cannot evaluate on an empty test set"));
    }
    let probs = predictor.predict_proba(test.features())?;
    let n_correct = probs
        .iter()
        .zip(test.labels())
        .filter(|(&p, &y)| u8::from(p >= THRESHOLD) == y)
        .count();
    let n_test = test.n_rows();
    let accuracy = n_correct as f64 / n_test as f64;
    let loss = if predictor.is_probabilistic() {
        bce_loss(&probs, test.labels())?
    } else {
        1.0 - accuracy
    };
    Ok(EvalReport {
        accuracy,
        loss,
        n_test,
        n_correct,
    })
}
