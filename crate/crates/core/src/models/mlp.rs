use super::loss::{bce_loss, sigmoid};
use super::params::{ModelParams, ShapeTag};
use super::{Predictor, TrainConfig};
use crate::data::{Dataset, Matrix};
use crate::{Error, Result};

/// Borrowed view of the network parameters by role.
struct Layers<'a> {
    n_inputs: usize,
    hidden: usize,
    values: &'a [f64],
}

impl<'a> Layers<'a> {
    fn new(params: &'a ModelParams, n_inputs: usize) -> Result<Self> {
        match params.shape() {
            ShapeTag::Mlp { n_inputs: n, hidden } if n == n_inputs => Ok(Layers {
                n_inputs,
                hidden,
                values: params.values(),
            }),
            other => Err(Error::ShapeMismatch {
                expected: format!("network parameters for {n_inputs} inputs"),
                found: format!("{other:?}"),
            }),
        }
    }

    fn hidden_weights(&self, k: usize) -> &[f64] {
        &self.values[k * self.n_inputs..(k + 1) * self.n_inputs]
    }

    fn hidden_bias(&self, k: usize) -> f64 {
        self.values[self.hidden * self.n_inputs + k]
    }

    fn output_weight(&self, k: usize) -> f64 {
        self.values[self.hidden * self.n_inputs + self.hidden + k]
    }

    fn output_bias(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    fn activations(&self, row: &[f64], hidden_out: &mut [f64]) -> f64 {
        let mut z = self.output_bias();
        for (k, h) in hidden_out.iter_mut().enumerate() {
            let pre: f64 = self
                .hidden_weights(k)
                .iter()
                .zip(row)
                .map(|(w, x)| w * x)
                .sum::<f64>()
                + self.hidden_bias(k);
            *h = sigmoid(pre);
            z += self.output_weight(k) * *h;
        }
        sigmoid(z)
    }
}

pub fn mlp_predict(params: &ModelParams, rows: &Matrix) -> Result<Vec<f64>> {
    let layers = Layers::new(params, rows.n_cols())?;
    let mut h = vec![0.0; layers.hidden];
    Ok(rows.rows().map(|r| layers.activations(r, &mut h)).collect())
}

/// Mean BCE and its backpropagated gradient, in parameter order.
pub fn mlp_loss_and_gradient(
    params: &ModelParams,
    x: &Matrix,
    y: &[u8],
) -> Result<(f64, Vec<f64>)> {
    let layers = Layers::new(params, x.n_cols())?;
    let (d, hw) = (layers.n_inputs, layers.hidden);
    let b1_at = hw * d;
    let w2_at = b1_at + hw;
    let b2_at = w2_at + hw;

    let mut grad = vec![0.0; params.n_params()];
    let mut probs = Vec::with_capacity(x.n_rows());
    let mut h = vec![0.0; hw];
    for (row, &label) in x.rows().zip(y) {
        let p = layers.activations(row, &mut h);
        probs.push(p);
        let delta_out = p - f64::from(label);
        grad[b2_at] += delta_out;
        for k in 0..hw {
            grad[w2_at + k] += delta_out * h[k];
            let delta_h = delta_out * layers.output_weight(k) * h[k] * (1.0 - h[k]);
            grad[b1_at + k] += delta_h;
            for (g, v) in grad[k * d..(k + 1) * d].iter_mut().zip(row) {
                *g += delta_h * v;
            }
        }
    }
    let loss = bce_loss(&probs, y)?;
    let n = x.n_rows() as f64;
    for g in &mut grad {
        *g /= n;
    }
    Ok((loss, grad))
}

/// Full-batch backpropagation for `cfg.epochs` epochs from `init`.
pub fn mlp_fit(train: &Dataset, init: &ModelParams, cfg: &TrainConfig) -> Result<ModelParams> {
    cfg.validate()?;
    Layers::new(init, train.n_features())?;
    if train.is_empty() {
        return Err(Error::Empty("network training needs rows"));
    }
    let mut params = init.clone();
    for epoch in 1..=cfg.epochs {
        let (loss, grad) = mlp_loss_and_gradient(&params, train.features(), train.labels())?;
        if !loss.is_finite() {
            return Err(Error::Divergence { epoch, loss });
        }
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
    Ok(params)
}

/// Fitted one-hidden-layer network with sigmoid activations.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub params: ModelParams,
}

impl MlpModel {
    pub fn fit(train: &Dataset, cfg: &TrainConfig) -> Result<Self> {
        cfg.validate()?;
        let init = ModelParams::mlp_init(train.n_features(), cfg.hidden_width, cfg.seed)?;
        Ok(MlpModel {
            params: mlp_fit(train, &init, cfg)?,
        })
    }
}

impl Predictor for MlpModel {
    fn predict_proba(&self, rows: &Matrix) -> Result<Vec<f64>> {
        mlp_predict(&self.params, rows)
    }
}
