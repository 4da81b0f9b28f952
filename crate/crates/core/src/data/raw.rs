use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::RaggedRow;
use crate::{Error, Result};

/// String-valued table straight from CSV, label column split off.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDataset {
    pub feature_names: Vec<String>,
    pub label_name: String,
    /// One entry per row, each with `feature_names.len()` cells.
    pub cells: Vec<Vec<String>>,
    pub labels: Vec<String>,
}

impl RawDataset {
    pub fn n_rows(&self) -> usize {
        self.cells.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Remove feature columns by name (identifier columns, constants...).
    pub fn drop_columns(&self, names: &[&str]) -> Result<RawDataset> {
        for n in names {
            if !self.feature_names.iter().any(|f| f == n) {
                return Err(Error::MissingColumn {
                    column: n.to_string(),
                });
            }
        }
        let keep: Vec<usize> = (0..self.n_features())
            .filter(|&j| !names.contains(&self.feature_names[j].as_str()))
            .collect();
        Ok(RawDataset {
            feature_names: keep.iter().map(|&j| self.feature_names[j].clone()).collect(),
            label_name: self.label_name.clone(),
            cells: self
                .cells
                .iter()
                .map(|r| keep.iter().map(|&j| r[j].clone()).collect())
                .collect(),
            labels: self.labels.clone(),
        })
    }

    fn row_has_missing(&self, i: usize) -> bool {
        self.labels[i].is_empty() || self.cells[i].iter().any(String::is_empty)
    }
}

/// Read a headed, comma-separated UTF-8 file and split off `label_column`.
///
/// Cells are whitespace-trimmed; an empty cell means "missing". Every row
/// whose field count differs from the header is reported in one error.
pub fn load_csv(path: impl AsRef<Path>, label_column: &str) -> Result<RawDataset> {
    let path = path.as_ref();
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::io(path, e))?;
    parse_csv(&text, label_column).map_err(|e| match e {
        Error::Csv { source, .. } => Error::Csv {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

/// [`load_csv`] over in-memory text.
pub fn parse_csv(text: &str, label_column: &str) -> Result<RawDataset> {
    let csv_err = |source| Error::Csv {
        path: "<memory>".into(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    let label_idx =
        header
            .iter()
            .position(|h| h == label_column)
            .ok_or_else(|| Error::MissingColumn {
                column: label_column.to_string(),
            })?;

    let mut cells = Vec::new();
    let mut labels = Vec::new();
    let mut ragged = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        if record.len() != header.len() {
            ragged.push(RaggedRow {
                row: i + 1,
                expected: header.len(),
                found: record.len(),
            });
            continue;
        }
        let mut row: Vec<String> = record.iter().map(str::to_string).collect();
        labels.push(row.remove(label_idx));
        cells.push(row);
    }
    if !ragged.is_empty() {
        return Err(Error::RaggedRows(ragged));
    }

    let mut feature_names = header;
    let label_name = feature_names.remove(label_idx);
    Ok(RawDataset {
        feature_names,
        label_name,
        cells,
        labels,
    })
}

/// Keep only rows without empty cells (label included), preserving order.
pub fn drop_missing(d: &RawDataset) -> RawDataset {
    let keep: Vec<usize> = (0..d.n_rows()).filter(|&i| !d.row_has_missing(i)).collect();
    RawDataset {
        feature_names: d.feature_names.clone(),
        label_name: d.label_name.clone(),
        cells: keep.iter().map(|&i| d.cells[i].clone()).collect(),
        labels: keep.iter().map(|&i| d.labels[i].clone()).collect(),
    }
}
