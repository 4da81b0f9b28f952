use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Matrix {
    data: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
}

impl Matrix {
    pub fn new(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_rows * n_cols {
            return Err(Error::ShapeMismatch {
                expected: format!("{n_rows}x{n_cols} = {} values", n_rows * n_cols),
                found: format!("{} values", data.len()),
            });
        }
        Ok(Matrix {
            data,
            n_rows,
            n_cols,
        })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Matrix {
            data: vec![0.0; n_rows * n_cols],
            n_rows,
            n_cols,
        }
    }

    /// Build from explicit rows. `n_cols` is needed to describe an empty matrix.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], n_cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * n_cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n_cols {
                return Err(Error::ShapeMismatch {
                    expected: format!("{n_cols} columns"),
                    found: format!("{} columns in row {i}", r.len()),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            data,
            n_rows: rows.len(),
            n_cols,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.n_rows).map(move |i| self.row(i))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(move |r| r[j])
    }

    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            data,
            n_rows: indices.len(),
            n_cols: self.n_cols,
        }
    }
}

/// Category strings for one feature; a category's code is its index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CodeTable {
    categories: Vec<String>,
}

impl CodeTable {
    pub fn new(categories: Vec<String>) -> Result<Self> {
        let mut seen = HashSet::new();
        for c in &categories {
            if !seen.insert(c.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate category `{c}` in code table"
                )));
            }
        }
        Ok(CodeTable { categories })
    }

    pub fn code_of(&self, category: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == category)
    }

    pub fn decode(&self, code: usize) -> Option<&str> {
        self.categories.get(code).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }
}

/// Labeled numeric feature matrix.
///
/// Labels are binary class codes ([`ASD`](super::ASD) = 0,
/// [`NON_ASD`](super::NON_ASD) = 1). Encoded categorical features carry a
/// [`CodeTable`] so codes can be decoded back to their original strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    label_name: String,
    features: Matrix,
    labels: Vec<u8>,
    encodings: Vec<Option<CodeTable>>,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, features: Matrix, labels: Vec<u8>) -> Result<Self> {
        if feature_names.len() != features.n_cols() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} feature names", features.n_cols()),
                found: format!("{}", feature_names.len()),
            });
        }
        if labels.len() != features.n_rows() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} labels", features.n_rows()),
                found: format!("{}", labels.len()),
            });
        }
        if let Some(bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::InvalidArgument(format!(
                "label {bad} is not a binary class code"
            )));
        }
        let encodings = vec![None; feature_names.len()];
        Ok(Dataset {
            feature_names,
            label_name: "class".to_string(),
            features,
            labels,
            encodings,
        })
    }

    /// Convenience constructor from row vectors, with generated names `x0..`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], labels: Vec<u8>) -> Result<Self> {
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let features = Matrix::from_rows(rows, n_cols)?;
        let names = (0..n_cols).map(|j| format!("x{j}")).collect();
        Dataset::new(names, features, labels)
    }

    pub fn with_label_name(mut self, name: impl Into<String>) -> Self {
        self.label_name = name.into();
        self
    }

    pub fn with_encodings(mut self, encodings: Vec<Option<CodeTable>>) -> Result<Self> {
        if encodings.len() != self.n_features() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} encodings", self.n_features()),
                found: format!("{}", encodings.len()),
            });
        }
        self.encodings = encodings;
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn label_name(&self) -> &str {
        &self.label_name
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.features.row(i)
    }

    pub fn encodings(&self) -> &[Option<CodeTable>] {
        &self.encodings
    }

    pub fn encoding(&self, feature: usize) -> Option<&CodeTable> {
        self.encodings[feature].as_ref()
    }

    /// Original category string of a cell, if the feature is encoded.
    pub fn decode(&self, row: usize, feature: usize) -> Option<&str> {
        let code = self.features.get(row, feature);
        if code < 0.0 || code.fract() != 0.0 {
            return None;
        }
        self.encoding(feature)?.decode(code as usize)
    }

    /// Row counts per class, indexed by class code.
    pub fn class_counts(&self) -> [usize; 2] {
        let mut counts = [0; 2];
        for &l in &self.labels {
            counts[usize::from(l)] += 1;
        }
        counts
    }

    /// New dataset holding the given rows, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            label_name: self.label_name.clone(),
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            encodings: self.encodings.clone(),
        }
    }

    /// Replace the feature matrix, keeping names, labels and encodings.
    pub fn with_features(&self, features: Matrix) -> Result<Dataset> {
        if features.n_rows() != self.n_rows() || features.n_cols() != self.n_features() {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{}", self.n_rows(), self.n_features()),
                found: format!("{}x{}", features.n_rows(), features.n_cols()),
            });
        }
        Ok(Dataset {
            features,
            ..self.clone()
        })
    }

    /// Stack datasets that share a schema.
    pub fn concat(parts: &[&Dataset]) -> Result<Dataset> {
        let first = parts.first().ok_or(Error::Empty("nothing to concatenate"))?;
        let mut data = Vec::new();
        let mut labels = Vec::new();
        for p in parts {
            if p.feature_names != first.feature_names {
                return Err(Error::ShapeMismatch {
                    expected: format!("{:?}", first.feature_names),
                    found: format!("{:?}", p.feature_names),
                });
            }
            data.extend_from_slice(p.features.as_slice());
            labels.extend_from_slice(&p.labels);
        }
        let features = Matrix::new(labels.len(), first.n_features(), data)?;
        Ok(Dataset {
            feature_names: first.feature_names.clone(),
            label_name: first.label_name.clone(),
            features,
            labels,
            encodings: first.encodings.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_binary_labels() {
        let err = Dataset::from_rows(&[[1.0], [2.0]], vec![0, 2]).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn rejects_label_length_mismatch() {
        assert!(Dataset::from_rows(&[[1.0], [2.0]], vec![0]).is_err());
    }

    #[test]
    fn code_tables_are_injective() {
        assert!(CodeTable::new(vec!["a".into(), "a".into()]).is_err());
        let t = CodeTable::new(vec!["m".into(), "f".into()]).unwrap();
        assert_eq!(t.code_of("f"), Some(1));
        assert_eq!(t.decode(0), Some("m"));
    }

    #[test]
    fn subset_and_concat() {
        let d = Dataset::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]], vec![0, 1, 0]).unwrap();
        let a = d.subset(&[2, 0]);
        assert_eq!(a.row(0), &[5.0, 6.0]);
        assert_eq!(a.labels(), &[0, 0]);
        let b = d.subset(&[1]);
        let c = Dataset::concat(&[&a, &b]).unwrap();
        assert_eq!(c.n_rows(), 3);
        assert_eq!(c.class_counts(), [2, 1]);
    }

    #[test]
    fn zero_width_matrix() {
        let m = Matrix::zeros(3, 0);
        assert_eq!(m.rows().count(), 3);
        assert!(m.row(2).is_empty());
    }
}
