//! Pearson correlation matrices over dataset features.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    /// Row-major `n × n`.
    pub values: Vec<f64>,
    /// Features with zero variance; their off-diagonal entries are 0.
    pub zero_variance: Vec<bool>,
}

impl CorrelationMatrix {
    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n() + j]
    }

    /// Mean of `|r|` over the entries above the diagonal; 0 for one feature.
    pub fn mean_abs_off_diagonal(&self) -> f64 {
        let n = self.n();
        if n < 2 {
            return 0.0;
        }
        let mut sum = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                sum += self.get(i, j).abs();
            }
        }
        sum / (n * (n - 1) / 2) as f64
    }
}

pub fn pearson_matrix(d: &Dataset) -> Result<CorrelationMatrix> {
    pearson_of(d.samples(), d.feature_names().to_vec())
}

pub fn pearson_of(samples: &Matrix, names: Vec<String>) -> Result<CorrelationMatrix> {
    let (m, n) = (samples.rows(), samples.cols());
    if m < 2 {
        return Err(Error::invalid(format!("correlation needs at least 2 rows, got {m}")));
    }
    if names.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: names.len() });
    }
    let mut means = vec![0.0; n];
    for row in samples.iter_rows() {
        for (acc, v) in means.iter_mut().zip(row) {
            *acc += v;
        }
    }
    means.iter_mut().for_each(|s| *s /= m as f64);

    let mut cov = vec![0.0; n * n];
    let mut centered = vec![0.0; n];
    for row in samples.iter_rows() {
        for j in 0..n {
            centered[j] = row[j] - means[j];
        }
        for i in 0..n {
            let ci = centered[i];
            for j in i..n {
                cov[i * n + j] += ci * centered[j];
            }
        }
    }
    let zero_variance: Vec<bool> = (0..n).map(|i| cov[i * n + i] == 0.0).collect();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in i + 1..n {
            let r = if zero_variance[i] || zero_variance[j] {
                0.0
            } else {
                (cov[i * n + j] / (cov[i * n + i].sqrt() * cov[j * n + j].sqrt())).clamp(-1.0, 1.0)
            };
            values[i * n + j] = r;
            values[j * n + i] = r;
        }
    }
    Ok(CorrelationMatrix { names, values, zero_variance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::default_feature_names;
    use crate::rng::seeded;
    use rand::Rng;

    /// Sample covariance / (sd · sd), each from its own loops.
    fn oracle(cols: &[Vec<f64>], i: usize, j: usize) -> f64 {
        let m = cols[i].len() as f64;
        let mi = cols[i].iter().sum::<f64>() / m;
        let mj = cols[j].iter().sum::<f64>() / m;
        let mut sxy = 0.0;
        let mut sxx = 0.0;
        let mut syy = 0.0;
        for k in 0..cols[i].len() {
            sxy += (cols[i][k] - mi) * (cols[j][k] - mj);
            sxx += (cols[i][k] - mi).powi(2);
            syy += (cols[j][k] - mj).powi(2);
        }
        (sxy / (m - 1.0)) / ((sxx / (m - 1.0)).sqrt() * (syy / (m - 1.0)).sqrt())
    }

    fn random(m: usize, n: usize, seed: u64) -> Matrix {
        let mut rng = seeded(seed);
        let base: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|k| (0..n).map(|j| base[k] * j as f64 * 0.2 + rng.gen_range(-1.0..1.0)).collect())
            .collect();
        Matrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn duplicate_and_negated_columns() {
        let rows: Vec<[f64; 3]> = (0..10).map(|k| {
            let x = (k as f64).sin();
            [x, x, -x]
        }).collect();
        let c = pearson_of(&Matrix::from_rows(&rows).unwrap(), default_feature_names(3)).unwrap();
        assert!((c.get(0, 1) - 1.0).abs() < 1e-12);
        assert!((c.get(0, 2) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_flagged() {
        let m = Matrix::from_rows(&[[1.0, 5.0], [2.0, 5.0], [4.0, 5.0]]).unwrap();
        let c = pearson_of(&m, default_feature_names(2)).unwrap();
        assert_eq!(c.zero_variance, vec![false, true]);
        assert_eq!((c.get(0, 1), c.get(1, 1)), (0.0, 1.0));
        assert!(pearson_of(&Matrix::from_rows(&[[1.0, 2.0]]).unwrap(), default_feature_names(2)).is_err());
    }

    #[test]
    fn matches_covariance_oracle() {
        let m = random(300, 11, 4);
        let cols: Vec<Vec<f64>> = (0..11).map(|j| m.column(j)).collect();
        let c = pearson_of(&m, default_feature_names(11)).unwrap();
        for i in 0..11 {
            assert_eq!(c.get(i, i), 1.0);
            for j in 0..11 {
                assert_eq!(c.get(i, j), c.get(j, i));
                if i != j {
                    assert!((c.get(i, j) - oracle(&cols, i, j)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn invariant_under_positive_affine_maps() {
        let m = random(120, 4, 8);
        let scaled: Vec<Vec<f64>> = m
            .iter_rows()
            .map(|r| r.iter().enumerate().map(|(j, v)| v * (j as f64 + 0.5) * 3.0 - 7.0 * j as f64).collect())
            .collect();
        let a = pearson_of(&m, default_feature_names(4)).unwrap();
        let b = pearson_of(&Matrix::from_rows(&scaled).unwrap(), default_feature_names(4)).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
