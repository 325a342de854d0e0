use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::grng::{grng, row_key, GrngSpec, DEFAULT_ATTEMPTS_FACTOR};
use super::{Algorithm, SyntheticBatch};
use crate::data::{class_counts, feature_stats, stratified_holdout, weighted_feature_stats, Dataset, FeatureStats};
use crate::error::{Error, Result};
use crate::neighbors::NeighborIndex;
use crate::rng::{derive_seed, seeded};
use crate::silhouette::{gourmet_weights_from, silhouette_coefficients, DEFAULT_BINS};

pub const DEFAULT_FILTER_FRACTION: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct G1noConfig {
    pub max_attempts_factor: usize,
    /// Share of the training set (stratified) the 1NN filter is built on;
    /// 1.0 uses every training row.
    pub filter_fraction: f64,
    pub bins: (f64, f64),
}

impl Default for G1noConfig {
    fn default() -> Self {
        Self {
            max_attempts_factor: DEFAULT_ATTEMPTS_FACTOR,
            filter_fraction: DEFAULT_FILTER_FRACTION,
            bins: DEFAULT_BINS,
        }
    }
}

pub fn g1no(train: &Dataset, seed: u64) -> Result<SyntheticBatch> {
    g1no_with(train, &G1noConfig::default(), seed)
}

pub fn g1no_gourmet(train: &Dataset, seed: u64) -> Result<SyntheticBatch> {
    g1no_gourmet_with(train, &G1noConfig::default(), seed)
}

pub fn g1no_with(train: &Dataset, config: &G1noConfig, seed: u64) -> Result<SyntheticBatch> {
    generate(train, config, Algorithm::G1no, seed)
}

pub fn g1no_gourmet_with(train: &Dataset, config: &G1noConfig, seed: u64) -> Result<SyntheticBatch> {
    generate(train, config, Algorithm::G1noGourmet, seed)
}

/// Generator parameters: plain minority statistics for G1No; for Gourmet,
/// statistics weighted by `(s_max - s_i) / (s_max - s_min)` where the
/// silhouettes come from the whole training set and the extremes are taken
/// over the minority rows.
pub fn g1no_stats(train: &Dataset, algorithm: Algorithm) -> Result<FeatureStats> {
    let counts = class_counts(train)?;
    let minority = train.class_samples(counts.minority);
    match algorithm {
        Algorithm::G1no => feature_stats(&minority),
        Algorithm::G1noGourmet => {
            let all = silhouette_coefficients(train)?;
            let own: Vec<f64> = train.class_indices(counts.minority).iter().map(|&i| all[i]).collect();
            let w = gourmet_weights_from(&own)?;
            let total: f64 = w.weights.iter().sum();
            let normalized: Vec<f64> = w.weights.iter().map(|x| x / total).collect();
            weighted_feature_stats(&minority, &normalized)
        }
        other => Err(Error::invalid(format!("{other} is not a Gaussian generator"))),
    }
}

fn generate(train: &Dataset, config: &G1noConfig, algorithm: Algorithm, seed: u64) -> Result<SyntheticBatch> {
    if !(config.filter_fraction > 0.0 && config.filter_fraction <= 1.0) {
        return Err(Error::Config(format!("filter_fraction must lie in (0, 1], got {}", config.filter_fraction)));
    }
    let counts = class_counts(train)?;
    let needed = counts.m_max - counts.m_min;
    if needed == 0 {
        return Ok(SyntheticBatch::empty(train.n_features(), algorithm, seed));
    }
    let stats = g1no_stats(train, algorithm)?;

    let all: Vec<usize> = (0..train.n_samples()).collect();
    let reference = if config.filter_fraction < 1.0 {
        let mut rng = seeded(derive_seed(seed, 0xF117));
        stratified_holdout(train.labels(), &all, 1.0 - config.filter_fraction, &mut rng).0
    } else {
        all
    };
    let ref_samples = train.samples().select_rows(&reference);
    let ref_labels: Vec<_> = reference.iter().map(|&i| train.labels()[i]).collect();
    let index = NeighborIndex::new(&ref_samples, &ref_labels)?;
    let existing: HashSet<Vec<u64>> = train.samples().iter_rows().map(row_key).collect();

    let spec = GrngSpec { count: needed, stats, max_attempts_factor: config.max_attempts_factor };
    let accept = |x: &[f64]| index.nn1_classify(x).is_ok_and(|t| t == counts.minority);
    let fresh = |x: &[f64]| !existing.contains(&row_key(x));
    match grng(&spec, accept, fresh, algorithm, seed) {
        Ok(mut batch) => {
            batch.filter_reference = Some(reference);
            Ok(batch)
        }
        Err(Error::BudgetExhausted { requested, mut batch }) => {
            batch.filter_reference = Some(reference);
            Err(Error::BudgetExhausted { requested, batch })
        }
        Err(e) => Err(e),
    }
}
