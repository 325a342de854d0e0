use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Per-feature location and spread used to parameterize the Gaussian generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub means: Vec<f64>,
    pub std_devs: Vec<f64>,
    pub weighted: bool,
}

impl FeatureStats {
    pub fn n_features(&self) -> usize {
        self.means.len()
    }
}

/// Column means and population standard deviations (divisor `m`).
pub fn feature_stats(samples: &Matrix) -> Result<FeatureStats> {
    let m = samples.rows();
    if m < 2 {
        return Err(Error::invalid(format!(
            "feature statistics need at least 2 rows, got {m}"
        )));
    }
    let n = samples.cols();
    let mut means = vec![0.0; n];
    for row in samples.iter_rows() {
        for (acc, v) in means.iter_mut().zip(row) {
            *acc += v;
        }
    }
    means.iter_mut().for_each(|s| *s /= m as f64);
    let mut sq = vec![0.0; n];
    for row in samples.iter_rows() {
        for j in 0..n {
            let d = row[j] - means[j];
            sq[j] += d * d;
        }
    }
    let std_devs = sq.into_iter().map(|s| (s / m as f64).sqrt()).collect();
    Ok(FeatureStats { means, std_devs, weighted: false })
}

/// Weighted mean `Σ w f / Σ w` and weighted standard deviation
/// `sqrt(Σ w (f - μ)² / Σ w)`.
pub fn weighted_feature_stats(samples: &Matrix, weights: &[f64]) -> Result<FeatureStats> {
    if weights.len() != samples.rows() {
        return Err(Error::DimensionMismatch {
            expected: samples.rows(),
            found: weights.len(),
        });
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::invalid(format!(
            "weights must be finite and non-negative, got {w}"
        )));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::invalid("weights sum to zero"));
    }
    let n = samples.cols();
    let mut means = vec![0.0; n];
    for (row, &w) in samples.iter_rows().zip(weights) {
        for (acc, v) in means.iter_mut().zip(row) {
            *acc += w * v;
        }
    }
    means.iter_mut().for_each(|s| *s /= total);
    let mut sq = vec![0.0; n];
    for (row, &w) in samples.iter_rows().zip(weights) {
        for j in 0..n {
            let d = row[j] - means[j];
            sq[j] += w * d * d;
        }
    }
    let std_devs = sq.into_iter().map(|s| (s / total).sqrt()).collect();
    Ok(FeatureStats { means, std_devs, weighted: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Mean by summation, variance by a second pass over the deviations.
    fn two_pass_oracle(rows: &[Vec<f64>], weights: Option<&[f64]>) -> (Vec<f64>, Vec<f64>) {
        let n = rows[0].len();
        let w: Vec<f64> = match weights {
            Some(w) => w.to_vec(),
            None => vec![1.0; rows.len()],
        };
        let total: f64 = w.iter().sum();
        let mut mean = vec![0.0; n];
        let mut std = vec![0.0; n];
        for j in 0..n {
            mean[j] = rows.iter().zip(&w).map(|(r, wi)| wi * r[j]).sum::<f64>() / total;
            let var = rows
                .iter()
                .zip(&w)
                .map(|(r, wi)| wi * (r[j] - mean[j]).powi(2))
                .sum::<f64>()
                / total;
            std[j] = var.sqrt();
        }
        (mean, std)
    }

    #[test]
    fn hand_computed() {
        let s = feature_stats(&Matrix::from_rows(&[[1.0], [3.0]]).unwrap()).unwrap();
        assert_eq!((s.means[0], s.std_devs[0]), (2.0, 1.0));
        let s = feature_stats(&Matrix::from_rows(&[[5.0], [5.0], [5.0]]).unwrap()).unwrap();
        assert_eq!((s.means[0], s.std_devs[0]), (5.0, 0.0));
    }

    #[test]
    fn single_row_rejected() {
        assert!(feature_stats(&Matrix::from_rows(&[[1.0]]).unwrap()).is_err());
    }

    #[test]
    fn degenerate_weight() {
        let m = Matrix::from_rows(&[[4.0, -1.0], [9.0, 7.0]]).unwrap();
        let s = weighted_feature_stats(&m, &[1.0, 0.0]).unwrap();
        assert_eq!(s.means, vec![4.0, -1.0]);
        assert_eq!(s.std_devs, vec![0.0, 0.0]);
        assert!(s.weighted);
    }

    #[test]
    fn bad_weights_rejected() {
        let m = Matrix::from_rows(&[[4.0], [9.0]]).unwrap();
        assert!(weighted_feature_stats(&m, &[0.0, 0.0]).is_err());
        assert!(weighted_feature_stats(&m, &[1.0, -0.5]).is_err());
        assert!(weighted_feature_stats(&m, &[1.0]).is_err());
        assert!(weighted_feature_stats(&m, &[1.0, f64::NAN]).is_err());
    }

    proptest! {
        #[test]
        fn unweighted_matches_oracle(rows in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 3), 2..100)) {
            let s = feature_stats(&Matrix::from_rows(&rows).unwrap()).unwrap();
            let (mean, std) = two_pass_oracle(&rows, None);
            for j in 0..3 {
                prop_assert!((s.means[j] - mean[j]).abs() <= 1e-12 * (1.0 + mean[j].abs()));
                prop_assert!((s.std_devs[j] - std[j]).abs() <= 1e-12 * (1.0 + std[j]));
                prop_assert!(s.std_devs[j] >= 0.0);
            }
        }

        #[test]
        fn weighted_matches_oracle(
            rows in prop::collection::vec(prop::collection::vec(-10f64..10.0, 4), 2..60),
            seed_weights in prop::collection::vec(0f64..1.0, 60),
        ) {
            let w: Vec<f64> = seed_weights[..rows.len()].iter().map(|w| w + 1e-3).collect();
            let s = weighted_feature_stats(&Matrix::from_rows(&rows).unwrap(), &w).unwrap();
            let (mean, std) = two_pass_oracle(&rows, Some(&w));
            for j in 0..4 {
                prop_assert!((s.means[j] - mean[j]).abs() <= 1e-12);
                prop_assert!((s.std_devs[j] - std[j]).abs() <= 1e-12);
            }
        }

        #[test]
        fn uniform_weights_reduce_to_unweighted(
            rows in prop::collection::vec(prop::collection::vec(-50f64..50.0, 2), 2..80),
            w in 0.01f64..10.0,
        ) {
            let m = Matrix::from_rows(&rows).unwrap();
            let plain = feature_stats(&m).unwrap();
            let weighted = weighted_feature_stats(&m, &vec![w; rows.len()]).unwrap();
            for j in 0..2 {
                prop_assert!((plain.means[j] - weighted.means[j]).abs() <= 1e-12);
                prop_assert!((plain.std_devs[j] - weighted.std_devs[j]).abs() <= 1e-12);
            }
        }
    }
}
