//! Stratified k-fold cross-validation.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{MetricSummary, MetricsReport};
use crate::data::{Dataset, Tag};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};

pub const DEFAULT_FOLDS: usize = 5;

/// Row indices of each fold, sorted. Each class is shuffled separately and
/// the concatenation is dealt round-robin, so fold sizes differ by at most
/// one and every class is spread as evenly as possible.
pub fn stratified_folds(labels: &[Tag], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::invalid(format!("cross-validation needs k >= 2, got {k}")));
    }
    if labels.len() < k {
        return Err(Error::invalid(format!("{} samples cannot fill {k} folds", labels.len())));
    }
    let mut rng = seeded(derive_seed(seed, 0xF01D));
    let mut order = Vec::with_capacity(labels.len());
    for tag in 0..2 {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == tag).collect();
        members.shuffle(&mut rng);
        order.extend(members);
    }
    let mut folds = vec![Vec::new(); k];
    for (pos, i) in order.into_iter().enumerate() {
        folds[pos % k].push(i);
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub mean: MetricSummary,
    pub folds: Vec<MetricsReport>,
}

/// Runs `runner(fold, train, test)` on every fold (concurrently) and averages
/// the fold metrics. Results are merged in fold order.
pub fn kfold_cv<F>(d: &Dataset, k: usize, seed: u64, runner: F) -> Result<CvReport>
where
    F: Fn(usize, &Dataset, &Dataset) -> Result<MetricsReport> + Sync,
{
    let folds = stratified_folds(d.labels(), k, seed)?;
    for (f, fold) in folds.iter().enumerate() {
        let mut seen = [false; 2];
        fold.iter().for_each(|&i| seen[d.labels()[i] as usize] = true);
        if !(seen[0] && seen[1]) {
            return Err(Error::SingleClassFold { fold: f });
        }
    }
    let reports = folds
        .par_iter()
        .enumerate()
        .map(|(f, test_idx)| {
            let train_idx: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|&(g, _)| g != f)
                .flat_map(|(_, idx)| idx.iter().copied())
                .collect();
            let train = d.subset(&train_idx)?;
            let test = d.subset(test_idx)?;
            runner(f, &train, &test).map_err(|e| Error::Iteration { index: f, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;
    let summaries: Vec<MetricSummary> = reports.iter().map(MetricsReport::summary).collect();
    let mean = MetricSummary::mean(&summaries).expect("k >= 2");
    Ok(CvReport { mean, folds: reports })
}
