//! Aggregator-bound messages.
//!
//! A client's only output is a [`LocalUpdate`], serialized as a versioned
//! JSON document:
//!
//! ```text
//! {"version":1,"client_id":3,"sample_size":38,"accuracy":0.8,"loss":0.41,
//!  "params":{"version":1,"model_kind":"logistic","shape_tag":{...},"values":[...]}}
//! ```
//!
//! Nothing row-wise from a client's shard can be expressed in this format.

use serde::{Deserialize, Serialize};

use crate::models::{ModelParams, ParamsDocument};
use crate::{Error, Result};

pub const WIRE_VERSION: u32 = 1;

/// Top-level keys of a wire message, in serialization order.
pub const WIRE_FIELDS: [&str; 6] = ["version", "client_id", "sample_size", "accuracy", "loss", "params"];
/// Keys of the nested parameter document.
pub const PARAMS_FIELDS: [&str; 4] = ["version", "model_kind", "shape_tag", "values"];

/// One client's round result.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUpdate {
    pub client_id: usize,
    pub params: ModelParams,
    /// Rows in the client's local training split.
    pub sample_size: usize,
    /// Accuracy on the client's local test split.
    pub local_accuracy: f64,
    /// Loss on the client's local test split.
    pub local_loss: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireMessage {
    version: u32,
    client_id: usize,
    sample_size: usize,
    accuracy: f64,
    loss: f64,
    params: ParamsDocument,
}

impl LocalUpdate {
    pub fn to_wire(&self) -> String {
        serde_json::to_string(&WireMessage {
            version: WIRE_VERSION,
            client_id: self.client_id,
            sample_size: self.sample_size,
            accuracy: self.local_accuracy,
            loss: self.local_loss,
            params: self.params.to_document_struct(),
        })
        .expect("update serializes")
    }

    pub fn from_wire(text: &str) -> Result<Self> {
        let msg: WireMessage =
            serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        if msg.version != WIRE_VERSION {
            return Err(Error::Serialization(format!(
                "unsupported update version {}",
                msg.version
            )));
        }
        Ok(LocalUpdate {
            client_id: msg.client_id,
            params: ModelParams::from_document_struct(msg.params)?,
            sample_size: msg.sample_size,
            local_accuracy: msg.accuracy,
            local_loss: msg.loss,
        })
    }
}

/// Check that a serialized message has exactly the allowed structure.
///
/// Top-level keys must be [`WIRE_FIELDS`], the parameter document must
/// hold exactly [`PARAMS_FIELDS`], every scalar field must be a number,
/// and `values` must be a flat numeric array of the declared length.
pub fn audit_wire_message(text: &str) -> Result<()> {
    use serde_json::Value;
    let fail = |m: String| Err(Error::Serialization(format!("audit: {m}")));
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
    let Value::Object(top) = &v else {
        return fail("message is not an object".into());
    };
    let mut keys: Vec<&str> = top.keys().map(String::as_str).collect();
    keys.sort_unstable();
    let mut want = WIRE_FIELDS.to_vec();
    want.sort_unstable();
    if keys != want {
        return fail(format!("unexpected top-level keys {keys:?}"));
    }
    for k in ["version", "client_id", "sample_size", "accuracy", "loss"] {
        if !top[k].is_number() {
            return fail(format!("`{k}` is not a number"));
        }
    }
    let Value::Object(params) = &top["params"] else {
        return fail("`params` is not an object".into());
    };
    let mut keys: Vec<&str> = params.keys().map(String::as_str).collect();
    keys.sort_unstable();
    let mut want = PARAMS_FIELDS.to_vec();
    want.sort_unstable();
    if keys != want {
        return fail(format!("unexpected parameter keys {keys:?}"));
    }
    let Value::Array(values) = &params["values"] else {
        return fail("`values` is not an array".into());
    };
    if !values.iter().all(Value::is_number) {
        return fail("`values` holds non-numeric entries".into());
    }
    let doc = ModelParams::from_document(&serde_json::to_string(params).unwrap())?;
    if doc.n_params() != values.len() {
        return fail("parameter count disagrees with layout".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn update() -> LocalUpdate {
        LocalUpdate {
            client_id: 4,
            params: ModelParams::new(
                crate::models::ShapeTag::Linear { n_features: 2 },
                vec![0.1, -2.5, 1e-17],
            )
            .unwrap(),
            sample_size: 38,
            local_accuracy: 0.8,
            local_loss: 0.4123,
        }
    }

    #[test]
    fn wire_round_trip() {
        let u = update();
        let w = u.to_wire();
        assert_eq!(LocalUpdate::from_wire(&w).unwrap(), u);
        audit_wire_message(&w).unwrap();
        assert!(w.starts_with("{\"version\":1,\"client_id\":4,"));
    }

    #[test]
    fn extra_fields_fail_decode_and_audit() {
        let w = update().to_wire().replacen('{', "{\"rows\":[[1,2]],", 1);
        assert!(LocalUpdate::from_wire(&w).is_err());
        assert!(audit_wire_message(&w).is_err());
    }

    #[test]
    fn nested_rows_fail_audit() {
        let w = update()
            .to_wire()
            .replace("[0.1,-2.5,1e-17]", "[[0.1,-2.5],[1e-17]]");
        assert!(audit_wire_message(&w).is_err());
    }
}
