use crate::data::{Dataset, Matrix};
use crate::{Error, Result};

/// Per-feature standardization to mean 0, variance 1.
///
/// Constant features keep scale 1 so they map to 0 instead of NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    means: Vec<f64>,
    scales: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &Matrix) -> Result<Self> {
        if x.n_rows() == 0 {
            return Err(Error::Empty("cannot standardize zero rows"));
        }
        let n = x.n_rows() as f64;
        let means: Vec<f64> = (0..x.n_cols()).map(|j| x.column(j).sum::<f64>() / n).collect();
        let scales = means
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let var = x.column(j).map(|v| (v - m) * (v - m)).sum::<f64>() / n;
                if var > 0.0 {
                    var.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Standardizer { means, scales })
    }

    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        if x.n_cols() != self.means.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} features", self.means.len()),
                found: format!("{}", x.n_cols()),
            });
        }
        let mut out = x.clone();
        for i in 0..out.n_rows() {
            for ((v, m), s) in out.row_mut(i).iter_mut().zip(&self.means).zip(&self.scales) {
                *v = (*v - m) / s;
            }
        }
        Ok(out)
    }

    pub fn apply(&self, d: &Dataset) -> Result<Dataset> {
        d.with_features(self.transform(d.features())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_mean_unit_variance() {
        let x = Matrix::from_rows(&[[1.0, 7.0], [3.0, 7.0], [5.0, 7.0]], 2).unwrap();
        let s = Standardizer::fit(&x).unwrap();
        let t = s.transform(&x).unwrap();
        let col: Vec<f64> = t.column(0).collect();
        assert!(col.iter().sum::<f64>().abs() < 1e-12);
        assert!((col.iter().map(|v| v * v).sum::<f64>() / 3.0 - 1.0).abs() < 1e-12);
        assert!(t.column(1).all(|v| v == 0.0));
    }

    #[test]
    fn width_mismatch() {
        let s = Standardizer::fit(&Matrix::from_rows(&[[1.0]], 1).unwrap()).unwrap();
        assert!(s.transform(&Matrix::zeros(1, 2)).is_err());
    }
}
