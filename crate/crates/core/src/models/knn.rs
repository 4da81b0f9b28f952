use super::{Predictor, TIE_CLASS};
use crate::data::{Dataset, Matrix};
use crate::{Error, Result};

fn check_k(k: usize, n_train: usize) -> Result<()> {
    if k == 0 || k.is_multiple_of(2) || k > n_train {
        return Err(Error::InvalidConfig(format!(
            "k must be odd and between 1 and {n_train}, got {k}"
        )));
    }
    Ok(())
}

/// Majority class among the `k` nearest training rows (euclidean).
///
/// Equal distances are ordered by training row index, so the lowest index
/// wins a tie at the k-th place.
pub fn knn_predict(train: &Dataset, queries: &Matrix, k: usize) -> Result<Vec<u8>> {
    check_k(k, train.n_rows())?;
    if queries.n_cols() != train.n_features() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} features", train.n_features()),
            found: format!("{}", queries.n_cols()),
        });
    }
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(train.n_rows());
    Ok(queries
        .rows()
        .map(|q| {
            dist.clear();
            dist.extend(train.features().rows().enumerate().map(|(i, r)| {
                let d2: f64 = r.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, i)
            }));
            dist.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut votes = [0usize; 2];
            for &(_, i) in &dist[..k] {
                votes[usize::from(train.labels()[i])] += 1;
            }
            match votes[0].cmp(&votes[1]) {
                std::cmp::Ordering::Greater => 0,
                std::cmp::Ordering::Less => 1,
                std::cmp::Ordering::Equal => TIE_CLASS,
            }
        })
        .collect())
}

/// Brute-force k-NN classifier holding its training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    train: Dataset,
    k: usize,
}

impl KnnModel {
    pub fn new(train: Dataset, k: usize) -> Result<Self> {
        check_k(k, train.n_rows())?;
        Ok(KnnModel { train, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl Predictor for KnnModel {
    fn predict_proba(&self, rows: &Matrix) -> Result<Vec<f64>> {
        Ok(knn_predict(&self.train, rows, self.k)?
            .into_iter()
            .map(f64::from)
            .collect())
    }

    fn is_probabilistic(&self) -> bool {
        false
    }
}
