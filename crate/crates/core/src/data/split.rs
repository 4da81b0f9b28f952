use rand::seq::SliceRandom;

use super::dataset::Dataset;
use crate::seed;
use crate::{Error, Result};

/// Disjoint train/test halves of one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPair {
    pub train: Dataset,
    pub test: Dataset,
    /// Source row indices of `train`, in `train` order.
    pub train_rows: Vec<usize>,
    /// Source row indices of `test`, in `test` order.
    pub test_rows: Vec<usize>,
}

impl SplitPair {
    fn from_indices(d: &Dataset, train_rows: Vec<usize>, test_rows: Vec<usize>) -> Self {
        SplitPair {
            train: d.subset(&train_rows),
            test: d.subset(&test_rows),
            train_rows,
            test_rows,
        }
    }
}

/// Number of training rows: `train_fraction * n` rounded half-up.
pub(crate) fn train_size(n: usize, train_fraction: f64) -> usize {
    (train_fraction * n as f64 + 0.5).floor() as usize
}

/// Shuffle with `seed`, then take the first `round(train_fraction * n)` rows for training.
pub fn train_test_split(d: &Dataset, train_fraction: f64, seed: u64) -> Result<SplitPair> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction must lie strictly between 0 and 1, got {train_fraction}"
        )));
    }
    let n = d.n_rows();
    let n_train = train_size(n, train_fraction);
    if n < 2 || n_train == 0 || n_train >= n {
        return Err(Error::InvalidArgument(format!(
            "{n} rows cannot be split {train_fraction} / {} with both sides non-empty",
            1.0 - train_fraction
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(seed));
    let test = order.split_off(n_train);
    Ok(SplitPair::from_indices(d, order, test))
}

/// Assignment of every row to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    /// Fold `fold` as the test set, every other fold as training data.
    pub fn split(&self, d: &Dataset, fold: usize) -> Result<SplitPair> {
        if d.n_rows() != self.assignments.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} rows", self.assignments.len()),
                found: format!("{} rows", d.n_rows()),
            });
        }
        if fold >= self.k {
            return Err(Error::InvalidArgument(format!(
                "fold {fold} out of range for k = {}",
                self.k
            )));
        }
        Ok(SplitPair::from_indices(
            d,
            self.train_indices(fold),
            self.test_indices(fold),
        ))
    }
}

/// Contiguous chunk lengths: the first `n % k` chunks get one extra row.
fn chunk_sizes(n: usize, k: usize) -> impl Iterator<Item = usize> {
    (0..k).map(move |i| n / k + usize::from(i < n % k))
}

/// Plan `k` folds over `n_rows` rows.
///
/// Without shuffling, folds are contiguous index ranges; with shuffling the
/// rows are permuted by `seed` first. Fold sizes differ by at most one.
pub fn kfold_plan(n_rows: usize, k: usize, shuffle: bool, seed: u64) -> Result<FoldPlan> {
    if k < 2 || k > n_rows {
        return Err(Error::InvalidArgument(format!(
            "k must satisfy 2 <= k <= {n_rows}, got {k}"
        )));
    }
    let mut order: Vec<usize> = (0..n_rows).collect();
    if shuffle {
        order.shuffle(&mut seed::rng(seed));
    }
    let mut assignments = vec![0; n_rows];
    let mut pos = 0;
    for (fold, size) in chunk_sizes(n_rows, k).enumerate() {
        for &i in &order[pos..pos + size] {
            assignments[i] = fold;
        }
        pos += size;
    }
    Ok(FoldPlan { k, assignments })
}

/// How rows are dealt out to clients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Partitioning {
    /// Seeded shuffle, then equal contiguous chunks.
    #[default]
    Iid,
    /// Seeded shuffle, stable sort by label, then equal chunks: most
    /// clients see a single class.
    LabelSorted,
}

/// Split into `n_clients` IID shards of near-equal size.
pub fn partition_clients(d: &Dataset, n_clients: usize, seed: u64) -> Result<Vec<Dataset>> {
    partition_clients_with(d, n_clients, seed, Partitioning::Iid)
}

/// Split into `n_clients` disjoint shards whose sizes differ by at most one.
///
/// Rows inside a shard keep their source order, so a single client receives
/// the dataset unchanged.
pub fn partition_clients_with(
    d: &Dataset,
    n_clients: usize,
    seed: u64,
    policy: Partitioning,
) -> Result<Vec<Dataset>> {
    Ok(partition_indices(d, n_clients, seed, policy)?
        .iter()
        .map(|idx| d.subset(idx))
        .collect())
}

pub(crate) fn partition_indices(
    d: &Dataset,
    n_clients: usize,
    seed: u64,
    policy: Partitioning,
) -> Result<Vec<Vec<usize>>> {
    if n_clients == 0 {
        return Err(Error::InvalidArgument("at least one client is required".into()));
    }
    let n = d.n_rows();
    if n < n_clients {
        return Err(Error::InvalidArgument(format!(
            "cannot give {n_clients} clients at least one row each from {n} rows"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(seed));
    if policy == Partitioning::LabelSorted {
        order.sort_by_key(|&i| d.labels()[i]);
    }
    let mut shards = Vec::with_capacity(n_clients);
    let mut pos = 0;
    for size in chunk_sizes(n, n_clients) {
        let mut idx = order[pos..pos + size].to_vec();
        idx.sort_unstable();
        shards.push(idx);
        pos += size;
    }
    Ok(shards)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rows(n: usize) -> Dataset {
        let r: Vec<[f64; 1]> = (0..n).map(|i| [i as f64]).collect();
        Dataset::from_rows(&r, (0..n).map(|i| (i % 2) as u8).collect()).unwrap()
    }

    fn ids(d: &Dataset) -> Vec<usize> {
        d.features().column(0).map(|v| v as usize).collect()
    }

    #[test]
    fn eighty_twenty() {
        let s = train_test_split(&rows(100), 0.8, 1).unwrap();
        assert_eq!((s.train.n_rows(), s.test.n_rows()), (80, 20));
    }

    #[test]
    fn five_rows_round_to_four_one() {
        let s = train_test_split(&rows(5), 0.8, 1).unwrap();
        assert_eq!((s.train.n_rows(), s.test.n_rows()), (4, 1));
    }

    #[test]
    fn half_rounds_up_on_train_side() {
        assert_eq!(train_size(5, 0.5), 3);
        assert_eq!(train_size(3, 0.5), 2);
    }

    #[test]
    fn split_is_deterministic() {
        let a = train_test_split(&rows(10), 0.8, 42).unwrap();
        let b = train_test_split(&rows(10), 0.8, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn split_rejects_degenerate_inputs() {
        assert!(train_test_split(&rows(1), 0.8, 0).is_err());
        assert!(train_test_split(&rows(2), 0.9, 0).is_err());
        assert!(train_test_split(&rows(10), 1.0, 0).is_err());
        assert!(train_test_split(&rows(10), 0.0, 0).is_err());
        assert!(train_test_split(&rows(10), f64::NAN, 0).is_err());
    }

    #[test]
    fn sixteen_rows_eight_folds() {
        let p = kfold_plan(16, 8, true, 3).unwrap();
        assert_eq!(p.fold_sizes(), vec![2; 8]);
    }

    #[test]
    fn remainder_goes_to_first_folds() {
        let p = kfold_plan(10, 3, false, 0).unwrap();
        assert_eq!(p.fold_sizes(), [4, 3, 3]);
        assert_eq!(p.assignments, [0, 0, 0, 0, 1, 1, 1, 2, 2, 2]);
    }

    #[test]
    fn k_equal_n_is_leave_one_out() {
        let p = kfold_plan(7, 7, true, 5).unwrap();
        let mut seen = p.assignments.clone();
        seen.sort_unstable();
        assert_eq!(seen, (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn k_out_of_range() {
        assert!(kfold_plan(5, 1, false, 0).is_err());
        assert!(kfold_plan(5, 6, false, 0).is_err());
    }

    #[test]
    fn fold_split_uses_one_fold_for_testing() {
        let d = rows(10);
        let p = kfold_plan(10, 3, false, 0).unwrap();
        let s = p.split(&d, 1).unwrap();
        assert_eq!(ids(&s.test), [4, 5, 6]);
        assert_eq!(s.train.n_rows(), 7);
        assert!(p.split(&d, 3).is_err());
    }

    #[test]
    fn seven_rows_three_clients() {
        let shards = partition_clients(&rows(7), 3, 9).unwrap();
        let sizes: Vec<_> = shards.iter().map(Dataset::n_rows).collect();
        assert_eq!(sizes, [3, 2, 2]);
    }

    #[test]
    fn one_client_gets_everything() {
        let d = rows(12);
        let shards = partition_clients(&d, 1, 77).unwrap();
        assert_eq!(shards, vec![d]);
    }

    #[test]
    fn behavioral_sized_partition() {
        let shards = partition_clients(&rows(487), 10, 1).unwrap();
        assert!(shards.iter().all(|s| s.n_rows() == 48 || s.n_rows() == 49));
    }

    #[test]
    fn more_clients_than_rows() {
        assert!(partition_clients(&rows(3), 4, 0).is_err());
        assert!(partition_clients(&rows(3), 0, 0).is_err());
    }

    #[test]
    fn label_sorted_policy_skews_shards() {
        let shards = partition_clients_with(&rows(20), 2, 0, Partitioning::LabelSorted).unwrap();
        assert_eq!(shards[0].class_counts(), [10, 0]);
        assert_eq!(shards[1].class_counts(), [0, 10]);
    }

    proptest! {
        #[test]
        fn split_partitions_rows(n in 2usize..60, frac in 0.05f64..0.95, seed in any::<u64>()) {
            let d = rows(n);
            if let Ok(s) = train_test_split(&d, frac, seed) {
                let mut all = [ids(&s.train), ids(&s.test)].concat();
                all.sort_unstable();
                prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
                prop_assert_eq!(s.train.n_rows(), train_size(n, frac));
            }
        }

        #[test]
        fn folds_partition_indices(n in 2usize..100, k_seed in any::<usize>(), shuffle: bool, seed: u64) {
            let k = 2 + k_seed % (n - 1);
            let p = kfold_plan(n, k, shuffle, seed).unwrap();
            let sizes = p.fold_sizes();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            prop_assert_eq!(sizes.iter().sum::<usize>(), n);
        }

        #[test]
        fn shards_are_a_permutation(n in 1usize..80, c_seed in any::<usize>(), seed: u64) {
            let c = 1 + c_seed % n;
            let d = rows(n);
            let shards = partition_clients(&d, c, seed).unwrap();
            let mut all: Vec<usize> = shards.iter().flat_map(ids).collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            let sizes: Vec<_> = shards.iter().map(Dataset::n_rows).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            prop_assert_eq!(partition_clients(&d, c, seed).unwrap(), shards);
        }
    }
}
