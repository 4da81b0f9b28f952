use super::loss::{bce_loss, sigmoid};
use super::params::{ModelParams, ShapeTag};
use super::{Predictor, TrainConfig};
use crate::data::{Dataset, Matrix};
use crate::{Error, Result};

fn check_linear(params: &ModelParams, n_features: usize) -> Result<()> {
    match params.shape() {
        ShapeTag::Linear { n_features: n } if n == n_features => Ok(()),
        other => Err(Error::ShapeMismatch {
            expected: format!("linear parameters for {n_features} features"),
            found: format!("{other:?}"),
        }),
    }
}

fn forward(values: &[f64], x: &Matrix) -> Vec<f64> {
    let (w, b) = values.split_at(values.len() - 1);
    x.rows()
        .map(|r| sigmoid(r.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + b[0]))
        .collect()
}

/// Probability of class 1 for every row.
pub fn logistic_predict(params: &ModelParams, rows: &Matrix) -> Result<Vec<f64>> {
    check_linear(params, rows.n_cols())?;
    Ok(forward(params.values(), rows))
}

/// Mean BCE and its gradient with respect to `[weights.., bias]`.
pub fn logistic_loss_and_gradient(
    params: &ModelParams,
    x: &Matrix,
    y: &[u8],
) -> Result<(f64, Vec<f64>)> {
    check_linear(params, x.n_cols())?;
    let probs = forward(params.values(), x);
    let loss = bce_loss(&probs, y)?;
    let n = x.n_rows() as f64;
    let d = x.n_cols();
    let mut grad = vec![0.0; d + 1];
    for ((row, &p), &label) in x.rows().zip(&probs).zip(y) {
        let err = p - f64::from(label);
        for (g, v) in grad[..d].iter_mut().zip(row) {
            *g += err * v;
        }
        grad[d] += err;
    }
    for g in &mut grad {
        *g /= n;
    }
    Ok((loss, grad))
}

/// Full-batch gradient descent on BCE for `cfg.epochs` epochs from `init`.
pub fn logistic_fit(train: &Dataset, init: &ModelParams, cfg: &TrainConfig) -> Result<ModelParams> {
    logistic_fit_traced(train, init, cfg).map(|(p, _)| p)
}

/// [`logistic_fit`] that also returns the loss before each epoch and after the last one.
pub fn logistic_fit_traced(
    train: &Dataset,
    init: &ModelParams,
    cfg: &TrainConfig,
) -> Result<(ModelParams, Vec<f64>)> {
    cfg.validate()?;
    check_linear(init, train.n_features())?;
    if train.is_empty() {
        return Err(Error::Empty("logistic regression needs training rows"));
    }
    let mut params = init.clone();
    let mut history = Vec::with_capacity(cfg.epochs + 1);
    for epoch in 1..=cfg.epochs {
        let (loss, grad) = logistic_loss_and_gradient(&params, train.features(), train.labels())?;
        if !loss.is_finite() {
            return Err(Error::Divergence { epoch, loss });
        }
        history.push(loss);
        let values: Vec<f64> = params
            .values()
            .iter()
            .zip(&grad)
            .map(|(w, g)| w - cfg.learning_rate * g)
            .collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence {
                epoch,
                loss: f64::NAN,
            });
        }
        params = ModelParams::from_parts_unchecked(params.shape(), values);
    }
    let probs = forward(params.values(), train.features());
    let final_loss = bce_loss(&probs, train.labels())?;
    if !final_loss.is_finite() {
        return Err(Error::Divergence {
            epoch: cfg.epochs,
            loss: final_loss,
        });
    }
    history.push(final_loss);
    Ok((params, history))
}

/// Fitted logistic regression.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub params: ModelParams,
}

impl LogisticModel {
    pub fn fit(train: &Dataset, cfg: &TrainConfig) -> Result<Self> {
        let init = ModelParams::zeros_linear(train.n_features());
        Ok(LogisticModel {
            params: logistic_fit(train, &init, cfg)?,
        })
    }
}

impl Predictor for LogisticModel {
    fn predict_proba(&self, rows: &Matrix) -> Result<Vec<f64>> {
        logistic_predict(&self.params, rows)
    }
}
