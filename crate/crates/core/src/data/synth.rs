use rand::seq::SliceRandom;
use rand::Rng;

use super::dataset::{Dataset, Matrix};
use crate::seed;
use crate::{Error, Result};

/// Generate `n` class-balanced rows whose values stay inside the template's ranges.
///
/// Values are drawn per class from the template rows of that class (all
/// template rows if the class is absent). Encoded categorical features are
/// sampled uniformly over the observed codes; numeric features uniformly
/// over the observed `[min, max]`. Exactly `n / 2` rows per class, in
/// seeded random order.
pub fn synthesize_behavioral(template: &Dataset, n: usize, seed: u64) -> Result<Dataset> {
    if template.is_empty() {
        return Err(Error::Empty("synthesis template has no rows"));
    }
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "synthetic row count must be even to balance classes, got {n}"
        )));
    }

    let w = template.n_features();
    let samplers: Vec<Vec<FeatureSampler>> = (0..2u8)
        .map(|class| {
            let mut pool: Vec<usize> = (0..template.n_rows())
                .filter(|&i| template.labels()[i] == class)
                .collect();
            if pool.is_empty() {
                pool = (0..template.n_rows()).collect();
            }
            (0..w)
                .map(|j| FeatureSampler::fit(template, &pool, j))
                .collect()
        })
        .collect();

    let mut rng = seed::rng(seed);
    let mut labels: Vec<u8> = std::iter::repeat_n(0, n / 2)
        .chain(std::iter::repeat_n(1, n / 2))
        .collect();
    labels.shuffle(&mut rng);

    let mut values = Matrix::zeros(n, w);
    for (i, &label) in labels.iter().enumerate() {
        let row = values.row_mut(i);
        for (j, s) in samplers[usize::from(label)].iter().enumerate() {
            row[j] = s.sample(&mut rng);
        }
    }

    Dataset::new(template.feature_names().to_vec(), values, labels)?
        .with_label_name(template.label_name())
        .with_encodings(template.encodings().to_vec())
}

enum FeatureSampler {
    Codes(Vec<f64>),
    Range { lo: f64, hi: f64 },
}

impl FeatureSampler {
    fn fit(d: &Dataset, pool: &[usize], j: usize) -> Self {
        if d.encoding(j).is_some() {
            let mut codes: Vec<f64> = Vec::new();
            for &i in pool {
                let v = d.features().get(i, j);
                if !codes.contains(&v) {
                    codes.push(v);
                }
            }
            FeatureSampler::Codes(codes)
        } else {
            let (lo, hi) = pool
                .iter()
                .map(|&i| d.features().get(i, j))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
            FeatureSampler::Range { lo, hi }
        }
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        match self {
            FeatureSampler::Codes(codes) => codes[rng.gen_range(0..codes.len())],
            FeatureSampler::Range { lo, hi } if lo == hi => *lo,
            FeatureSampler::Range { lo, hi } => rng.gen_range(*lo..=*hi),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::CodeTable;
    use proptest::prelude::*;

    fn range_template() -> Dataset {
        Dataset::from_rows(&[[0.0, 5.0], [3.0, 1.0], [1.5, 2.0], [2.0, 4.0]], vec![0, 1, 0, 1])
            .unwrap()
    }

    #[test]
    fn values_stay_in_range_and_classes_balance() {
        let d = synthesize_behavioral(&range_template(), 2940, 11).unwrap();
        assert_eq!(d.n_rows(), 2940);
        assert_eq!(d.class_counts(), [1470, 1470]);
        assert!(d.features().column(0).all(|v| (0.0..=3.0).contains(&v)));
        assert!(d.features().column(1).all(|v| (1.0..=5.0).contains(&v)));
    }

    #[test]
    fn single_row_template_is_duplicated() {
        let t = Dataset::from_rows(&[[2.0, 7.0, 1.0]], vec![1]).unwrap();
        let d = synthesize_behavioral(&t, 2, 0).unwrap();
        assert_eq!(d.row(0), t.row(0));
        assert_eq!(d.row(1), t.row(0));
        assert_eq!(d.class_counts(), [1, 1]);
    }

    #[test]
    fn categorical_features_draw_observed_codes() {
        let enc = CodeTable::new(vec!["a".into(), "b".into(), "c".into(), "d".into()]).unwrap();
        let t = Dataset::from_rows(&[[0.0], [3.0], [3.0]], vec![0, 0, 1])
            .unwrap()
            .with_encodings(vec![Some(enc)])
            .unwrap();
        let d = synthesize_behavioral(&t, 200, 4).unwrap();
        assert!(d.features().column(0).all(|v| v == 0.0 || v == 3.0));
        assert!(d.features().column(0).any(|v| v == 0.0));
        assert_eq!(d.encoding(0), t.encoding(0));
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let a = synthesize_behavioral(&range_template(), 50, 9).unwrap();
        let b = synthesize_behavioral(&range_template(), 50, 9).unwrap();
        assert_eq!(a, b);
        let c = synthesize_behavioral(&range_template(), 50, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_odd_count_and_empty_template() {
        assert!(matches!(
            synthesize_behavioral(&range_template(), 3, 0),
            Err(Error::InvalidArgument(_))
        ));
        let empty = Dataset::from_rows::<[f64; 0]>(&[], vec![]).unwrap();
        assert!(matches!(synthesize_behavioral(&empty, 2, 0), Err(Error::Empty(_))));
    }

    proptest! {
        #[test]
        fn range_audit(
            rows in proptest::collection::vec((proptest::collection::vec(-50.0f64..50.0, 3), 0u8..2), 1..15),
            half in 0usize..40,
            seed in any::<u64>(),
        ) {
            let feats: Vec<Vec<f64>> = rows.iter().map(|r| r.0.clone()).collect();
            let t = Dataset::from_rows(&feats, rows.iter().map(|r| r.1).collect()).unwrap();
            let d = synthesize_behavioral(&t, 2 * half, seed).unwrap();
            prop_assert_eq!(d.class_counts(), [half, half]);
            for j in 0..3 {
                let lo = t.features().column(j).fold(f64::INFINITY, f64::min);
                let hi = t.features().column(j).fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(d.features().column(j).all(|v| lo <= v && v <= hi));
            }
        }
    }
}
