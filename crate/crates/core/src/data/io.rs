use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::dataset::{Dataset, Matrix};
use super::encode::Schema;
use super::labels::parse_label;
use super::raw::load_csv;
use crate::{Error, Result};

/// Sidecar schema location for a dataset CSV: `x.csv` → `x.schema.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("schema.json")
}

/// Write `bytes` to a sibling temp file, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes)
        .and_then(|_| f.sync_all())
        .map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Serialize a dataset as CSV (features, then the label column as 0/1).
pub fn dataset_to_csv(d: &Dataset) -> String {
    let mut out = String::new();
    for name in d.feature_names() {
        out.push_str(&csv_field(name));
        out.push(',');
    }
    out.push_str(&csv_field(d.label_name()));
    out.push('\n');
    for (row, label) in d.features().rows().zip(d.labels()) {
        for v in row {
            out.push_str(&v.to_string());
            out.push(',');
        }
        out.push_str(&label.to_string());
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Write a dataset CSV plus its schema sidecar.
pub fn write_dataset_csv(d: &Dataset, path: &Path) -> Result<()> {
    write_atomic(path, dataset_to_csv(d).as_bytes())?;
    write_atomic(&sidecar_path(path), Schema::for_dataset(d).to_json().as_bytes())
}

/// Read a numeric dataset CSV written by [`write_dataset_csv`].
///
/// Every feature cell must parse as a number. If a schema sidecar exists,
/// its code tables are reattached.
pub fn read_dataset_csv(path: &Path, label_column: &str) -> Result<Dataset> {
    let raw = load_csv(path, label_column)?;
    let mut values = Matrix::zeros(raw.n_rows(), raw.n_features());
    for (i, row) in raw.cells.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            values.row_mut(i)[j] = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::NotNumeric {
                    row: i + 1,
                    column: raw.feature_names[j].clone(),
                    value: cell.clone(),
                })?;
        }
    }
    let labels = raw
        .labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            parse_label(l).ok_or_else(|| Error::UnknownLabel {
                row: i + 1,
                value: l.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut d = Dataset::new(raw.feature_names.clone(), values, labels)?
        .with_label_name(raw.label_name.clone());

    let sidecar = sidecar_path(path);
    if sidecar.exists() {
        let text = fs::read_to_string(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
        let schema = Schema::from_json(&text)?;
        let encodings = raw
            .feature_names
            .iter()
            .map(|n| schema.feature(n).and_then(|f| f.codes.clone()))
            .collect();
        d = d.with_encodings(encodings)?;
    }
    Ok(d)
}
