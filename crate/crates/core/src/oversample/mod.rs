//! Synthetic minority generation: SMOTE, ADASYN and the Gaussian
//! 1NN-rejection generators G1No and G1No Gourmet.

mod adasyn;
mod g1no;
mod grng;
mod smote;

pub use adasyn::{adasyn, adasyn_allocation, AdasynAllocation};
pub use g1no::{g1no, g1no_gourmet, g1no_gourmet_with, g1no_stats, g1no_with, G1noConfig};
pub use grng::{grng, row_key, GrngSpec};
pub use smote::{interpolate, smote, DEFAULT_K};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{class_counts, Dataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::silhouette::DEFAULT_BINS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Smote,
    Adasyn,
    G1no,
    G1noGourmet,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Self::Smote, Self::Adasyn, Self::G1no, Self::G1noGourmet];

    pub fn name(self) -> &'static str {
        match self {
            Self::Smote => "smote",
            Self::Adasyn => "adasyn",
            Self::G1no => "g1no",
            Self::G1noGourmet => "g1no-gourmet",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm '{s}' (smote, adasyn, g1no, g1no-gourmet)")))
    }
}

/// Generated minority rows with the counters of the run that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticBatch {
    pub samples: Matrix,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub accepted: usize,
    pub rejected_by_1nn: usize,
    pub rejected_duplicate: usize,
    pub attempts: usize,
    /// Training rows the 1NN filter was built on (Gaussian generators only).
    pub filter_reference: Option<Vec<usize>>,
}

impl SyntheticBatch {
    pub(crate) fn empty(n_features: usize, algorithm: Algorithm, seed: u64) -> Self {
        Self {
            samples: Matrix::with_cols(n_features),
            algorithm,
            seed,
            accepted: 0,
            rejected_by_1nn: 0,
            rejected_duplicate: 0,
            attempts: 0,
            filter_reference: None,
        }
    }

    /// Interpolating generators accept every draw.
    pub(crate) fn unfiltered(samples: Matrix, algorithm: Algorithm, seed: u64) -> Self {
        let g = samples.rows();
        Self {
            samples,
            algorithm,
            seed,
            accepted: g,
            rejected_by_1nn: 0,
            rejected_duplicate: 0,
            attempts: g,
            filter_reference: None,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.rows() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OversampleConfig {
    /// Neighbour count for SMOTE and ADASYN.
    pub k: usize,
    pub max_attempts_factor: usize,
    /// Share of the training set the 1NN filter is built on.
    pub filter_fraction: f64,
    /// Silhouette bin thresholds carried into Gourmet reports.
    pub bins: (f64, f64),
}

impl Default for OversampleConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            max_attempts_factor: grng::DEFAULT_ATTEMPTS_FACTOR,
            filter_fraction: g1no::DEFAULT_FILTER_FRACTION,
            bins: DEFAULT_BINS,
        }
    }
}

impl OversampleConfig {
    fn g1no(&self) -> G1noConfig {
        G1noConfig {
            max_attempts_factor: self.max_attempts_factor,
            filter_fraction: self.filter_fraction,
            bins: self.bins,
        }
    }
}

/// Grows the minority of `train` until both classes have the same size.
/// Returns the balanced set (original rows first) and the batch.
pub fn rebalance(train: &Dataset, algorithm: Algorithm, config: &OversampleConfig, seed: u64) -> Result<(Dataset, SyntheticBatch)> {
    let counts = class_counts(train)?;
    let g = counts.m_max - counts.m_min;
    let batch = if g == 0 {
        SyntheticBatch::empty(train.n_features(), algorithm, seed)
    } else {
        match algorithm {
            Algorithm::Smote => smote(&train.class_samples(counts.minority), config.k, g, seed)?,
            Algorithm::Adasyn => adasyn(train, config.k, g, seed)?,
            Algorithm::G1no => g1no_with(train, &config.g1no(), seed)?,
            Algorithm::G1noGourmet => g1no_gourmet_with(train, &config.g1no(), seed)?,
        }
    };
    let balanced = train.append_class_rows(&batch.samples, counts.minority)?;
    Ok((balanced, batch))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{imbalance_degree, make_synthetic_dataset, SyntheticSpec};

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("gan".parse::<Algorithm>().is_err());
    }

    #[test]
    fn every_algorithm_balances() {
        let d = make_synthetic_dataset(&SyntheticSpec::separable(3, 40, 107, 4.0, 2)).unwrap();
        for a in Algorithm::ALL {
            let (out, batch) = rebalance(&d, a, &OversampleConfig::default(), 5).unwrap();
            assert_eq!(batch.len(), 67, "{a}");
            assert_eq!(imbalance_degree(&out).unwrap(), 1.0, "{a}");
            assert_eq!(batch.algorithm, a);
        }
    }

    #[test]
    fn balanced_input_is_a_no_op() {
        let d = make_synthetic_dataset(&SyntheticSpec::separable(3, 40, 40, 4.0, 2)).unwrap();
        let (out, batch) = rebalance(&d, Algorithm::Smote, &OversampleConfig::default(), 1).unwrap();
        assert!(batch.is_empty());
        assert_eq!(out, d);
    }
}
