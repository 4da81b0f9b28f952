use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ModelKind;
use crate::seed;
use crate::{Error, Result};

pub const PARAMS_DOC_VERSION: u32 = 1;

/// Layout of a flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "snake_case")]
pub enum ShapeTag {
    /// `n_features` weights followed by one bias.
    Linear { n_features: usize },
    /// Hidden weights (`hidden` rows of `n_inputs`), hidden biases,
    /// output weights (`hidden`), output bias.
    Mlp { n_inputs: usize, hidden: usize },
}

impl ShapeTag {
    pub fn n_params(&self) -> usize {
        match *self {
            ShapeTag::Linear { n_features } => n_features + 1,
            ShapeTag::Mlp { n_inputs, hidden } => hidden * n_inputs + 2 * hidden + 1,
        }
    }

    pub fn n_inputs(&self) -> usize {
        match *self {
            ShapeTag::Linear { n_features } => n_features,
            ShapeTag::Mlp { n_inputs, .. } => n_inputs,
        }
    }

    pub fn model_kind(&self) -> ModelKind {
        match self {
            ShapeTag::Linear { .. } => ModelKind::Logistic,
            ShapeTag::Mlp { .. } => ModelKind::Mlp,
        }
    }
}

/// Trainable parameters: the unit exchanged between clients and the aggregator.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    values: Vec<f64>,
    shape: ShapeTag,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ParamsDocument {
    pub(crate) version: u32,
    pub(crate) model_kind: ModelKind,
    pub(crate) shape_tag: ShapeTag,
    pub(crate) values: Vec<f64>,
}

impl ModelParams {
    pub fn new(shape: ShapeTag, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.n_params() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} parameters for {shape:?}", shape.n_params()),
                found: format!("{}", values.len()),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("parameters must be finite".into()));
        }
        Ok(ModelParams { values, shape })
    }

    pub(crate) fn from_parts_unchecked(shape: ShapeTag, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), shape.n_params());
        ModelParams { values, shape }
    }

    /// All-zero logistic parameters for `n_features` inputs.
    pub fn zeros_linear(n_features: usize) -> Self {
        let shape = ShapeTag::Linear { n_features };
        ModelParams {
            values: vec![0.0; shape.n_params()],
            shape,
        }
    }

    /// Seeded network parameters, each uniform in `[-0.5, 0.5]`.
    pub fn mlp_init(n_inputs: usize, hidden: usize, seed: u64) -> Result<Self> {
        if hidden == 0 {
            return Err(Error::InvalidConfig("hidden width must be at least 1".into()));
        }
        let shape = ShapeTag::Mlp { n_inputs, hidden };
        let mut rng = seed::rng(seed);
        let values = (0..shape.n_params())
            .map(|_| rng.gen_range(-0.5..=0.5))
            .collect();
        Ok(ModelParams { values, shape })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn shape(&self) -> ShapeTag {
        self.shape
    }

    pub fn n_params(&self) -> usize {
        self.values.len()
    }

    pub fn model_kind(&self) -> ModelKind {
        self.shape.model_kind()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub(crate) fn to_document_struct(&self) -> ParamsDocument {
        ParamsDocument {
            version: PARAMS_DOC_VERSION,
            model_kind: self.model_kind(),
            shape_tag: self.shape,
            values: self.values.clone(),
        }
    }

    pub(crate) fn from_document_struct(doc: ParamsDocument) -> Result<Self> {
        if doc.version != PARAMS_DOC_VERSION {
            return Err(Error::Serialization(format!(
                "unsupported parameter document version {}",
                doc.version
            )));
        }
        if doc.model_kind != doc.shape_tag.model_kind() {
            return Err(Error::Serialization(format!(
                "model kind {:?} does not match layout {:?}",
                doc.model_kind, doc.shape_tag
            )));
        }
        ModelParams::new(doc.shape_tag, doc.values)
    }

    /// Versioned JSON document `{version, model_kind, shape_tag, values}`.
    ///
    /// Floats are written in shortest round-trip form, so
    /// `from_document(to_document(p)) == p` bit for bit.
    pub fn to_document(&self) -> String {
        serde_json::to_string(&self.to_document_struct()).expect("parameters serialize")
    }

    pub fn from_document(text: &str) -> Result<Self> {
        let doc: ParamsDocument =
            serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        Self::from_document_struct(doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn shape_counts() {
        assert_eq!(ShapeTag::Linear { n_features: 4 }.n_params(), 5);
        assert_eq!(ShapeTag::Mlp { n_inputs: 3, hidden: 2 }.n_params(), 6 + 4 + 1);
    }

    #[test]
    fn rejects_wrong_length_and_non_finite() {
        let s = ShapeTag::Linear { n_features: 1 };
        assert!(ModelParams::new(s, vec![1.0]).is_err());
        assert!(ModelParams::new(s, vec![1.0, f64::NAN]).is_err());
        assert!(ModelParams::new(s, vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn mlp_init_is_seeded_and_bounded() {
        let a = ModelParams::mlp_init(5, 16, 3).unwrap();
        assert_eq!(a, ModelParams::mlp_init(5, 16, 3).unwrap());
        assert_ne!(a, ModelParams::mlp_init(5, 16, 4).unwrap());
        assert!(a.values().iter().all(|v| (-0.5..=0.5).contains(v)));
        assert!(ModelParams::mlp_init(5, 0, 3).is_err());
    }

    #[test]
    fn document_layout() {
        let p = ModelParams::new(ShapeTag::Linear { n_features: 1 }, vec![0.5, -2.0]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&p.to_document()).unwrap();
        assert_eq!(v["version"], 1);
        assert_eq!(v["model_kind"], "logistic");
        assert_eq!(v["shape_tag"]["layout"], "linear");
        assert_eq!(v["values"][1], -2.0);
    }

    #[test]
    fn document_rejects_tampering() {
        let p = ModelParams::zeros_linear(2);
        let doc = p.to_document();
        assert!(ModelParams::from_document(&doc.replace("\"version\":1", "\"version\":2")).is_err());
        assert!(ModelParams::from_document(&doc.replace("logistic", "mlp")).is_err());
        assert!(ModelParams::from_document(&doc.replace("[0.0,0.0,0.0]", "[0.0]")).is_err());
        assert!(ModelParams::from_document("{").is_err());
    }

    proptest! {
        #[test]
        fn document_round_trip_is_bit_exact(
            values in proptest::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 1..40)
        ) {
            let shape = ShapeTag::Linear { n_features: values.len() - 1 };
            let p = ModelParams::new(shape, values).unwrap();
            let back = ModelParams::from_document(&p.to_document()).unwrap();
            let bits = |m: &ModelParams| m.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(&back), bits(&p));
        }
    }
}
