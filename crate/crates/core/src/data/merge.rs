use rand::seq::SliceRandom;

use super::dataset::{Dataset, Matrix};
use crate::landmarks::DistanceFeatures;
use crate::seed;
use crate::{Error, Result};

/// Column names appended by [`merge_datasets`], in order.
pub const DISTANCE_FEATURE_NAMES: [&str; 3] = ["brow_distance", "eye_distance", "nose_lips_distance"];

/// Append facial distances to behavioral rows of the same class.
///
/// Within each class both sides are shuffled with `seed` and paired
/// one-to-one until the shorter side runs out, so the output holds
/// `sum over classes of min(behavioral count, distance count)` rows. Rows
/// keep the behavioral dataset's relative order.
pub fn merge_datasets(
    behavioral: &Dataset,
    distances: &[DistanceFeatures],
    seed: u64,
) -> Result<Dataset> {
    let b_counts = behavioral.class_counts();
    let mut d_counts = [0usize; 2];
    for d in distances {
        d_counts[usize::from(d.class_label)] += 1;
    }
    for class in 0..2u8 {
        let (b, d) = (b_counts[usize::from(class)], d_counts[usize::from(class)]);
        if b > 0 && d == 0 {
            return Err(Error::ClassMismatch {
                class,
                present_in: "behavioral",
                absent_from: "facial distance",
            });
        }
        if d > 0 && b == 0 {
            return Err(Error::ClassMismatch {
                class,
                present_in: "facial distance",
                absent_from: "behavioral",
            });
        }
    }

    let mut rng = seed::rng(seed);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for class in 0..2u8 {
        let mut b_idx: Vec<usize> = (0..behavioral.n_rows())
            .filter(|&i| behavioral.labels()[i] == class)
            .collect();
        let mut d_idx: Vec<usize> = (0..distances.len())
            .filter(|&i| distances[i].class_label == class)
            .collect();
        b_idx.shuffle(&mut rng);
        d_idx.shuffle(&mut rng);
        pairs.extend(b_idx.into_iter().zip(d_idx));
    }
    pairs.sort_unstable();

    let w = behavioral.n_features();
    let mut values = Matrix::zeros(pairs.len(), w + 3);
    let mut labels = Vec::with_capacity(pairs.len());
    for (out, &(bi, di)) in pairs.iter().enumerate() {
        let row = values.row_mut(out);
        row[..w].copy_from_slice(behavioral.row(bi));
        row[w..].copy_from_slice(&distances[di].as_array());
        labels.push(behavioral.labels()[bi]);
    }

    let mut names = behavioral.feature_names().to_vec();
    names.extend(DISTANCE_FEATURE_NAMES.iter().map(|s| s.to_string()));
    let mut encodings = behavioral.encodings().to_vec();
    encodings.extend([None, None, None]);
    Dataset::new(names, values, labels)?
        .with_label_name(behavioral.label_name())
        .with_encodings(encodings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dist(id: usize, class: u8) -> DistanceFeatures {
        DistanceFeatures {
            image_id: format!("img{id}"),
            class_label: class,
            brow_distance: id as f64,
            eye_distance: 100.0 + id as f64,
            nose_lips_distance: 200.0 + id as f64,
        }
    }

    fn behavioral(labels: &[u8], width: usize) -> Dataset {
        let rows: Vec<Vec<f64>> = (0..labels.len()).map(|i| vec![i as f64; width]).collect();
        Dataset::from_rows(&rows, labels.to_vec()).unwrap()
    }

    #[test]
    fn nineteen_plus_three_is_twenty_two() {
        let b = behavioral(&[0, 1, 0, 1], 19);
        let d: Vec<_> = [0, 1, 1].iter().enumerate().map(|(i, &c)| dist(i, c)).collect();
        let m = merge_datasets(&b, &d, 3).unwrap();
        assert_eq!(m.n_features(), 22);
        assert_eq!(m.n_rows(), 3);
        assert_eq!(&m.feature_names()[19..], DISTANCE_FEATURE_NAMES);
    }

    #[test]
    fn minimal_pair() {
        let b = behavioral(&[0], 2);
        let m = merge_datasets(&b, &[dist(5, 0)], 0).unwrap();
        assert_eq!(m.n_rows(), 1);
        assert_eq!(m.row(0), &[0.0, 0.0, 5.0, 105.0, 205.0]);
    }

    #[test]
    fn class_missing_on_one_side() {
        let b = behavioral(&[0, 1], 2);
        assert!(matches!(
            merge_datasets(&b, &[dist(0, 0)], 0),
            Err(Error::ClassMismatch { class: 1, .. })
        ));
        let b = behavioral(&[0], 2);
        assert!(matches!(
            merge_datasets(&b, &[dist(0, 0), dist(1, 1)], 0),
            Err(Error::ClassMismatch { class: 1, .. })
        ));
    }

    #[test]
    fn seed_changes_pairing_not_counts() {
        let labels: Vec<u8> = (0..40).map(|i| (i % 2) as u8).collect();
        let b = behavioral(&labels, 1);
        let d: Vec<_> = (0..30).map(|i| dist(i, (i % 2) as u8)).collect();
        let a = merge_datasets(&b, &d, 1).unwrap();
        let c = merge_datasets(&b, &d, 2).unwrap();
        assert_eq!(a.n_rows(), 30);
        assert_eq!(c.n_rows(), 30);
        assert_ne!(a, c);
        assert_eq!(a, merge_datasets(&b, &d, 1).unwrap());
    }

    proptest! {
        #[test]
        fn pairs_respect_class_and_maximal_count(
            b_labels in proptest::collection::vec(0u8..2, 1..30),
            d_labels in proptest::collection::vec(0u8..2, 1..30),
            seed in any::<u64>(),
        ) {
            let b = behavioral(&b_labels, 1);
            let d: Vec<_> = d_labels.iter().enumerate().map(|(i, &c)| dist(i, c)).collect();
            let bc = b.class_counts();
            let mut dc = [0; 2];
            for &c in &d_labels { dc[usize::from(c)] += 1; }
            let consistent = (0..2).all(|c| (bc[c] == 0) == (dc[c] == 0));
            match merge_datasets(&b, &d, seed) {
                Ok(m) => {
                    prop_assert!(consistent);
                    prop_assert_eq!(m.n_rows(), bc[0].min(dc[0]) + bc[1].min(dc[1]));
                    let mut used = std::collections::HashSet::new();
                    for i in 0..m.n_rows() {
                        let bi = m.row(i)[0] as usize;
                        let di = m.row(i)[1] as usize;
                        prop_assert_eq!(b_labels[bi], m.labels()[i]);
                        prop_assert_eq!(d_labels[di], m.labels()[i]);
                        prop_assert!(used.insert(di));
                    }
                }
                Err(_) => prop_assert!(!consistent),
            }
        }
    }
}
