use serde::{Deserialize, Serialize};

use super::dataset::{CodeTable, Dataset, Matrix};
use super::labels::parse_label;
use super::raw::RawDataset;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Categorical,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub name: String,
    pub kind: FeatureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codes: Option<CodeTable>,
}

/// Sidecar describing how each column of a CSV is interpreted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub version: u32,
    pub label_column: String,
    pub features: Vec<FeatureSchema>,
}

impl Schema {
    /// Schema of an encoded dataset, code tables included.
    pub fn for_dataset(d: &Dataset) -> Schema {
        let features = d
            .feature_names()
            .iter()
            .zip(d.encodings())
            .map(|(name, enc)| FeatureSchema {
                name: name.clone(),
                kind: if enc.is_some() {
                    FeatureKind::Categorical
                } else {
                    FeatureKind::Numeric
                },
                codes: enc.clone(),
            })
            .collect();
        Schema {
            version: SCHEMA_VERSION,
            label_column: d.label_name().to_string(),
            features,
        }
    }

    pub fn feature(&self, name: &str) -> Option<&FeatureSchema> {
        self.features.iter().find(|f| f.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    pub fn from_json(text: &str) -> Result<Schema> {
        let s: Schema =
            serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        if s.version != SCHEMA_VERSION {
            return Err(Error::Serialization(format!(
                "unsupported schema version {}",
                s.version
            )));
        }
        Ok(s)
    }
}

/// Encode every feature as categorical.
///
/// Each distinct string gets a dense code in order of first appearance;
/// labels are coded ASD → 0, non-ASD → 1.
pub fn encode_categorical(raw: &RawDataset) -> Result<Dataset> {
    encode(raw, |_| (FeatureKind::Categorical, None))
}

/// Encode with per-feature kinds from `schema`.
///
/// Features the schema does not mention are categorical. A categorical
/// feature that already has a code table keeps those codes and appends
/// unseen strings after them.
pub fn encode_with_schema(raw: &RawDataset, schema: &Schema) -> Result<Dataset> {
    encode(raw, |name| match schema.feature(name) {
        Some(f) => (f.kind, f.codes.clone()),
        None => (FeatureKind::Categorical, None),
    })
}

fn encode(
    raw: &RawDataset,
    kind_of: impl Fn(&str) -> (FeatureKind, Option<CodeTable>),
) -> Result<Dataset> {
    let n = raw.n_rows();
    let w = raw.n_features();

    let mut labels = Vec::with_capacity(n);
    for (i, l) in raw.labels.iter().enumerate() {
        if l.is_empty() {
            return Err(Error::MissingValue {
                row: i + 1,
                column: raw.label_name.clone(),
            });
        }
        labels.push(parse_label(l).ok_or_else(|| Error::UnknownLabel {
            row: i + 1,
            value: l.clone(),
        })?);
    }

    let mut values = Matrix::zeros(n, w);
    let mut encodings = Vec::with_capacity(w);
    for (j, name) in raw.feature_names.iter().enumerate() {
        let (kind, seed_codes) = kind_of(name);
        let mut categories: Vec<String> = seed_codes
            .map(|t| t.categories().to_vec())
            .unwrap_or_default();
        for i in 0..n {
            let cell = &raw.cells[i][j];
            if cell.is_empty() {
                return Err(Error::MissingValue {
                    row: i + 1,
                    column: name.clone(),
                });
            }
            values.row_mut(i)[j] = match kind {
                FeatureKind::Numeric => cell.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(
                    || Error::NotNumeric {
                        row: i + 1,
                        column: name.clone(),
                        value: cell.clone(),
                    },
                )?,
                FeatureKind::Categorical => {
                    let code = match categories.iter().position(|c| c == cell) {
                        Some(c) => c,
                        None => {
                            categories.push(cell.clone());
                            categories.len() - 1
                        }
                    };
                    code as f64
                }
            };
        }
        encodings.push(match kind {
            FeatureKind::Numeric => None,
            FeatureKind::Categorical => Some(CodeTable::new(categories)?),
        });
    }

    Dataset::new(raw.feature_names.clone(), values, labels)?
        .with_label_name(raw.label_name.clone())
        .with_encodings(encodings)
}
