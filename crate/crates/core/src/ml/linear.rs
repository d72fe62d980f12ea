use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::Samples;
use crate::error::{Error, Result};

const RIDGE: f64 = 1e-8;

/// Ordinary least squares with intercept, in original feature units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

impl LinearModel {
    /// Solves the normal equations on standardized features with a tiny
    /// ridge on the slopes, then maps the solution back.
    pub fn fit(data: &Samples) -> Result<Self> {
        let p = data.n_features();
        if data.len() < p + 1 {
            return Err(Error::invalid(
                "training data",
                format!(
                    "need at least {} rows for {p} features, got {}",
                    p + 1,
                    data.len()
                ),
            ));
        }
        let stats = data.standardization();
        let n = data.len();
        let x = DMatrix::from_fn(n, p + 1, |i, j| {
            if j == 0 {
                1.0
            } else {
                stats.apply_one(j - 1, data.rows[i][j - 1])
            }
        });
        let y = DVector::from_column_slice(&data.targets);
        let mut gram = x.transpose() * &x;
        for j in 1..=p {
            gram[(j, j)] += RIDGE * n as f64;
        }
        let rhs = x.transpose() * y;
        let beta = gram
            .clone()
            .cholesky()
            .map(|c| c.solve(&rhs))
            .or_else(|| gram.lu().solve(&rhs))
            .ok_or_else(|| Error::Singular("normal equations".into()))?;
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::Singular("normal equations".into()));
        }
        let coefficients: Vec<f64> = (0..p).map(|j| beta[j + 1] / stats.scale[j]).collect();
        let intercept = beta[0]
            - coefficients
                .iter()
                .zip(&stats.mean)
                .map(|(c, m)| c * m)
                .sum::<f64>();
        Ok(LinearModel {
            intercept,
            coefficients,
        })
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(row)
                .map(|(c, x)| c * x)
                .sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recovers_an_exact_line() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 * 0.7]).collect();
        let targets = rows.iter().map(|r| 2.0 * r[0] + 1.0).collect();
        let m = LinearModel::fit(&Samples::new(rows, targets).unwrap()).unwrap();
        assert!((m.coefficients[0] - 2.0).abs() < 1e-6);
        assert!((m.intercept - 1.0).abs() < 1e-6);
    }

    #[test]
    fn constant_targets_give_zero_slope() {
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let m = LinearModel::fit(&Samples::new(rows, vec![3.0; 8]).unwrap()).unwrap();
        assert!(m.coefficients.iter().all(|c| c.abs() < 1e-9));
        assert!((m.intercept - 3.0).abs() < 1e-9);
    }

    #[test]
    fn residuals_are_orthogonal_to_features() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows: Vec<Vec<f64>> = (0..25)
            .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let targets: Vec<f64> = (0..25).map(|_| rng.random_range(-5.0..5.0)).collect();
        let data = Samples::new(rows, targets).unwrap();
        let m = LinearModel::fit(&data).unwrap();
        let resid: Vec<f64> = data
            .rows
            .iter()
            .zip(&data.targets)
            .map(|(r, y)| y - m.predict_row(r))
            .collect();
        assert!(resid.iter().sum::<f64>().abs() < 1e-6);
        for j in 0..3 {
            let dot: f64 = data.rows.iter().zip(&resid).map(|(r, e)| r[j] * e).sum();
            assert!(dot.abs() < 1e-6, "feature {j}: {dot}");
        }
    }

    #[test]
    fn too_few_rows_is_an_error() {
        let data = Samples::new(vec![vec![1.0, 2.0], vec![2.0, 1.0]], vec![1.0, 2.0]).unwrap();
        assert!(LinearModel::fit(&data).is_err());
    }
}
