use super::LocalUpdate;
use crate::models::ModelParams;
use crate::sum::Compensated;
use crate::{Error, Result};

fn check_shapes(updates: &[LocalUpdate]) -> Result<&ModelParams> {
    let first = &updates.first().ok_or(Error::Empty("no updates to aggregate"))?.params;
    for u in updates {
        if u.params.shape() != first.shape() {
            return Err(Error::ShapeMismatch {
                expected: format!("{:?}", first.shape()),
                found: format!("{:?} from client {}", u.params.shape(), u.client_id),
            });
        }
    }
    Ok(first)
}

/// Coordinate-wise mean of the client parameters: `h_j = (sum_i w_ij) / n`.
pub fn aggregate_uniform(updates: &[LocalUpdate]) -> Result<ModelParams> {
    let first = check_shapes(updates)?;
    if updates.len() == 1 {
        return Ok(first.clone());
    }
    let n = updates.len() as f64;
    let values = (0..first.n_params())
        .map(|j| {
            let mut acc = Compensated::default();
            for u in updates {
                acc.add(u.params.values()[j]);
            }
            acc.value() / n
        })
        .collect();
    ModelParams::new(first.shape(), values)
}

/// Sample-size-weighted mean: `h_j = sum_i Sd_i * w_ij / sum_i Sd_i`.
///
/// With equal sample sizes this is exactly [`aggregate_uniform`].
pub fn aggregate_size_weighted(updates: &[LocalUpdate]) -> Result<ModelParams> {
    let first = check_shapes(updates)?;
    let total: usize = updates.iter().map(|u| u.sample_size).sum();
    if total == 0 {
        return Err(Error::InvalidArgument(
            "total sample size is zero; cannot weight by size".into(),
        ));
    }
    if updates.iter().all(|u| u.sample_size == updates[0].sample_size) {
        return aggregate_uniform(updates);
    }
    let total = total as f64;
    let values = (0..first.n_params())
        .map(|j| {
            let mut acc = Compensated::default();
            for u in updates {
                acc.add(u.sample_size as f64 * u.params.values()[j]);
            }
            acc.value() / total
        })
        .collect();
    ModelParams::new(first.shape(), values)
}

/// Weighted global accuracy: `sum_i Acc_i * Sd_i / sum_i Sd_i`.
pub fn global_accuracy(updates: &[LocalUpdate]) -> Result<f64> {
    weighted_accuracy(updates.iter().map(|u| (u.local_accuracy, u.sample_size)))
}

pub(crate) fn weighted_accuracy(pairs: impl Iterator<Item = (f64, usize)>) -> Result<f64> {
    let mut num = Compensated::default();
    let mut den = 0usize;
    for (acc, size) in pairs {
        num.add(acc * size as f64);
        den += size;
    }
    if den == 0 {
        return Err(Error::InvalidArgument(
            "total sample size is zero; global accuracy undefined".into(),
        ));
    }
    Ok(num.value() / den as f64)
}
