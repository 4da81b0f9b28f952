//! Landmark record files and distance CSVs.
//!
//! A landmark file holds one face per line:
//!
//! ```text
//! image_id,label,x0:y0,x1:y1,...,x67:y67
//! ```
//!
//! `label` is any spelling accepted by [`parse_label`]. Blank lines are
//! ignored. A record that does not describe exactly 68 valid points is
//! skipped and reported, never fatal.

use std::fmt::Write as _;
use std::path::Path;

use super::geometry::{DistanceFeatures, LandmarkSet, Point, N_LANDMARKS};
use crate::data::{load_csv, parse_label, Dataset, Matrix, DISTANCE_FEATURE_NAMES};
use crate::{Error, Result};

pub const DISTANCE_CSV_HEADER: &str = "image_id,class,brow_distance,eye_distance,nose_lips_distance";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedRecord {
    /// 1-based line number in the source file.
    pub line: usize,
    pub image_id: String,
    pub reason: String,
}

/// Valid records plus a report of the skipped ones.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LandmarkFile {
    pub sets: Vec<LandmarkSet>,
    pub skipped: Vec<SkippedRecord>,
}

pub fn parse_landmarks(path: impl AsRef<Path>) -> Result<LandmarkFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_landmarks_str(&text))
}

pub fn parse_landmarks_str(text: &str) -> LandmarkFile {
    let mut out = LandmarkFile::default();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        let image_id = fields.next().unwrap_or_default().to_string();
        match parse_record(&image_id, fields) {
            Ok(set) => out.sets.push(set),
            Err(reason) => {
                log::info!("line {}: skipping `{image_id}`: {reason}", i + 1);
                out.skipped.push(SkippedRecord {
                    line: i + 1,
                    image_id,
                    reason,
                });
            }
        }
    }
    out
}

fn parse_record<'a>(
    image_id: &str,
    mut fields: impl Iterator<Item = &'a str>,
) -> std::result::Result<LandmarkSet, String> {
    if image_id.is_empty() {
        return Err("empty image id".into());
    }
    let label_raw = fields.next().ok_or("missing class label")?;
    let label = parse_label(label_raw).ok_or_else(|| format!("unknown class label `{label_raw}`"))?;
    let pairs: Vec<&str> = fields.collect();
    if pairs.len() != N_LANDMARKS {
        return Err(format!("{} points, expected {N_LANDMARKS}", pairs.len()));
    }
    let points = pairs
        .iter()
        .enumerate()
        .map(|(k, pair)| {
            let (x, y) = pair
                .split_once(':')
                .ok_or_else(|| format!("point {k}: `{pair}` is not x:y"))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("point {k}: `{pair}` is not numeric"))
            };
            Ok(Point::new(parse(x)?, parse(y)?))
        })
        .collect::<std::result::Result<Vec<_>, String>>()?;
    LandmarkSet::new(image_id, label, points).map_err(|e| e.to_string())
}

/// One landmark-file line for `l`, without the trailing newline.
pub fn format_record(l: &LandmarkSet) -> String {
    let mut s = format!("{},{}", l.image_id(), l.class_label());
    for p in l.points() {
        write!(s, ",{}:{}", p.x, p.y).unwrap();
    }
    s
}

pub fn distances_to_csv(rows: &[DistanceFeatures]) -> String {
    let mut s = String::from(DISTANCE_CSV_HEADER);
    s.push('\n');
    for d in rows {
        writeln!(
            s,
            "{},{},{},{},{}",
            d.image_id, d.class_label, d.brow_distance, d.eye_distance, d.nose_lips_distance
        )
        .unwrap();
    }
    s
}

/// Read a CSV produced by [`distances_to_csv`].
pub fn read_distances_csv(path: impl AsRef<Path>) -> Result<Vec<DistanceFeatures>> {
    let raw = load_csv(path, "class")?;
    let col = |name: &str| {
        raw.feature_names
            .iter()
            .position(|f| f == name)
            .ok_or_else(|| Error::MissingColumn {
                column: name.to_string(),
            })
    };
    let (id, brow, eye, nose) = (
        col("image_id")?,
        col("brow_distance")?,
        col("eye_distance")?,
        col("nose_lips_distance")?,
    );
    raw.cells
        .iter()
        .zip(&raw.labels)
        .enumerate()
        .map(|(i, (row, label))| {
            let num = |j: usize| {
                row[j]
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite() && *v >= 0.0)
                    .ok_or_else(|| Error::NotNumeric {
                        row: i + 1,
                        column: raw.feature_names[j].clone(),
                        value: row[j].clone(),
                    })
            };
            Ok(DistanceFeatures {
                image_id: row[id].clone(),
                class_label: parse_label(label).ok_or_else(|| Error::UnknownLabel {
                    row: i + 1,
                    value: label.clone(),
                })?,
                brow_distance: num(brow)?,
                eye_distance: num(eye)?,
                nose_lips_distance: num(nose)?,
            })
        })
        .collect()
}

/// Distance rows as a three-feature dataset, image ids dropped.
pub fn distances_dataset(rows: &[DistanceFeatures]) -> Result<Dataset> {
    let values: Vec<[f64; 3]> = rows.iter().map(DistanceFeatures::as_array).collect();
    Dataset::new(
        DISTANCE_FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        Matrix::from_rows(&values, 3)?,
        rows.iter().map(|r| r.class_label).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landmarks::extract_all;

    fn record(id: &str, label: &str, n: usize) -> String {
        let pts: Vec<String> = (0..n).map(|i| format!("{}:{}", i, 2 * i)).collect();
        format!("{id},{label},{}", pts.join(","))
    }

    #[test]
    fn distances_as_dataset() {
        let f = parse_landmarks_str(&[record("a", "0", 68), record("b", "1", 68)].join("\n"));
        let rows = extract_all(&f.sets);
        let d = distances_dataset(&rows).unwrap();
        assert_eq!(d.n_features(), 3);
        assert_eq!(d.labels(), &[0, 1]);
        assert_eq!(d.row(1), &rows[1].as_array());
    }

    #[test]
    fn three_valid_records() {
        let text = [
            record("a", "autistic", 68),
            record("b", "non_autistic", 68),
            record("c", "0", 68),
        ]
        .join("\n");
        let f = parse_landmarks_str(&text);
        assert_eq!(f.sets.len(), 3);
        assert!(f.skipped.is_empty());
        assert_eq!(f.sets[1].class_label(), 1);
        assert_eq!(f.sets[2].point(67), Point::new(67.0, 134.0));
    }

    #[test]
    fn short_record_is_skipped_and_reported() {
        let text = format!("{}\n{}\n", record("good", "1", 68), record("blurry", "0", 60));
        let f = parse_landmarks_str(&text);
        assert_eq!(f.sets.len(), 1);
        assert_eq!(f.skipped.len(), 1);
        assert_eq!(f.skipped[0].image_id, "blurry");
        assert_eq!(f.skipped[0].line, 2);
        assert!(f.skipped[0].reason.contains("60 points"));
    }

    #[test]
    fn garbled_records_are_skipped() {
        let mut bad_pair = record("p", "1", 68);
        bad_pair = bad_pair.replacen("3:6", "3;6", 1);
        let text = [
            bad_pair,
            record("q", "maybe", 68),
            record("r", "1", 68).replacen("5:10", "-5:10", 1),
            "lonely".to_string(),
        ]
        .join("\n");
        let f = parse_landmarks_str(&text);
        assert!(f.sets.is_empty());
        assert_eq!(f.skipped.len(), 4);
    }

    #[test]
    fn empty_input() {
        let f = parse_landmarks_str("");
        assert!(f.sets.is_empty() && f.skipped.is_empty());
        assert_eq!(parse_landmarks_str("\n\n"), LandmarkFile::default());
    }

    #[test]
    fn unreadable_file() {
        assert!(matches!(
            parse_landmarks("/no/such/landmarks.txt"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn format_round_trips() {
        let f = parse_landmarks_str(&record("x", "1", 68));
        let again = parse_landmarks_str(&format_record(&f.sets[0]));
        assert_eq!(again.sets, f.sets);
    }

    #[test]
    fn distance_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let f = parse_landmarks_str(&[record("a", "1", 68), record("b", "0", 68)].join("\n"));
        let dists = extract_all(&f.sets);
        let path = dir.path().join("d.csv");
        std::fs::write(&path, distances_to_csv(&dists)).unwrap();
        assert_eq!(read_distances_csv(&path).unwrap(), dists);
    }
}
