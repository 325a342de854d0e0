//! Silhouette-ordered removal of one class and the progressive imbalance
//! sweep that looks for the imbalance degree at which a classifier breaks.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{imbalance_ratio, Dataset, Tag};
use crate::error::{Error, Result};
use crate::evaluator::{stratified_folds, MetricSummary, MetricsReport};
use crate::rng::{derive_seed, seeded};
use crate::silhouette::{silhouette_report, SilhouetteReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RemovalOrder {
    /// Highest silhouette first: the most typical members go first.
    #[serde(alias = "desc")]
    Descending,
    /// Lowest silhouette first: boundary members go first.
    #[serde(alias = "asc")]
    Ascending,
    /// Seeded uniform permutation, ignoring silhouette.
    Random,
}

impl FromStr for RemovalOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desc" | "descending" => Ok(Self::Descending),
            "asc" | "ascending" => Ok(Self::Ascending),
            "random" => Ok(Self::Random),
            other => Err(Error::Config(format!("unknown removal order '{other}' (asc, desc, random)"))),
        }
    }
}

impl fmt::Display for RemovalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Descending => "desc",
            Self::Ascending => "asc",
            Self::Random => "random",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemovalPlan {
    pub target: Tag,
    pub fraction: f64,
    pub order: RemovalOrder,
    /// Drives the random order and the shuffle of the reduced set.
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Removal {
    /// Remaining rows, shuffled by the plan seed.
    pub reduced: Dataset,
    /// Removed rows in removal order; `None` when nothing was removed.
    pub removed: Option<Dataset>,
    /// Original indices of the removed rows, in removal order.
    pub removed_indices: Vec<usize>,
}

/// Samples removed from a class of `class_count` at `fraction`.
/// A small tolerance keeps products such as `0.29 × 100` from flooring to 28.
pub fn removal_count(fraction: f64, class_count: usize) -> usize {
    ((fraction * class_count as f64) + 1e-9).floor() as usize
}

/// Indices of `target` members in the order they would be removed. Ties in
/// silhouette keep ascending index order.
pub fn removal_order(d: &Dataset, report: &SilhouetteReport, target: Tag, order: RemovalOrder, seed: u64) -> Result<Vec<usize>> {
    if report.len() != d.n_samples() || report.labels != d.labels() {
        return Err(Error::invalid("silhouette report was not computed on this dataset"));
    }
    let mut members = d.class_indices(target);
    let s = &report.coefficients;
    match order {
        RemovalOrder::Descending => members.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b))),
        RemovalOrder::Ascending => members.sort_by(|&a, &b| s[a].total_cmp(&s[b]).then(a.cmp(&b))),
        RemovalOrder::Random => members.shuffle(&mut seeded(derive_seed(seed, 0xD0E5))),
    }
    Ok(members)
}

pub fn remove_fraction(train: &Dataset, plan: &RemovalPlan, report: &SilhouetteReport) -> Result<Removal> {
    if !(0.0..=1.0).contains(&plan.fraction) {
        return Err(Error::invalid(format!("fraction must lie in [0, 1], got {}", plan.fraction)));
    }
    let class_count = train.count_of(plan.target);
    if class_count == 0 {
        return Err(Error::invalid(format!("target class {} is absent", plan.target)));
    }
    let r = removal_count(plan.fraction, class_count);
    if r >= class_count {
        return Err(Error::invalid(format!(
            "removing {r} of {class_count} samples would leave a single-class training set"
        )));
    }
    let order = removal_order(train, report, plan.target, plan.order, plan.seed)?;
    let removed_indices = order[..r].to_vec();
    let mut gone = vec![false; train.n_samples()];
    removed_indices.iter().for_each(|&i| gone[i] = true);
    let mut kept: Vec<usize> = (0..train.n_samples()).filter(|&i| !gone[i]).collect();
    kept.shuffle(&mut seeded(derive_seed(plan.seed, 0x5A1E)));
    Ok(Removal {
        reduced: train.subset(&kept)?,
        removed: (!removed_indices.is_empty()).then(|| train.subset(&removed_indices)).transpose()?,
        removed_indices,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub fractions: Vec<f64>,
    /// Class to deplete; the minority of the training set when absent.
    pub target: Option<Tag>,
    pub order: RemovalOrder,
    pub seed: u64,
}

impl SweepConfig {
    /// 5%, 10%, …, 95%.
    pub fn default_fractions() -> Vec<f64> {
        (1..=19).map(|k| k as f64 / 20.0).collect()
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            fractions: Self::default_fractions(),
            target: None,
            order: RemovalOrder::Descending,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    /// 0 is the untouched baseline.
    pub iteration: usize,
    pub fraction: f64,
    pub removed: usize,
    /// Share of each class in the reduced training set, indexed by tag.
    pub class_percentages: [f64; 2],
    pub imbalance_degree: f64,
    pub metrics: MetricSummary,
    pub acceptable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Idft {
    pub iteration: usize,
    pub fraction: f64,
    pub imbalance_degree: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub class_names: Vec<String>,
    pub target: Tag,
    pub order: RemovalOrder,
    pub baseline: SweepRecord,
    pub records: Vec<SweepRecord>,
    pub idft: Option<Idft>,
}

impl SweepResult {
    /// Removal fraction of the IDft iteration, or 1.0 when the predicate never fails.
    pub fn cliff_fraction(&self) -> f64 {
        self.idft.map_or(1.0, |i| i.fraction)
    }
}

/// Default acceptability: F-measure at least half the baseline F-measure.
pub fn relative_f_measure(baseline: &MetricSummary, current: &MetricSummary) -> bool {
    current.f_measure >= 0.5 * baseline.f_measure
}

fn validate_fractions(fractions: &[f64]) -> Result<()> {
    if fractions.is_empty() {
        return Err(Error::invalid("sweep needs at least one fraction"));
    }
    if fractions.iter().any(|f| !(*f > 0.0 && *f < 1.0)) {
        return Err(Error::invalid("sweep fractions must lie in (0, 1)"));
    }
    if fractions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("sweep fractions must be strictly ascending"));
    }
    Ok(())
}

fn record(iteration: usize, fraction: f64, removed: usize, reduced: &Dataset, metrics: MetricSummary) -> SweepRecord {
    let (c0, c1) = (reduced.count_of(0), reduced.count_of(1));
    let m = (c0 + c1) as f64;
    SweepRecord {
        iteration,
        fraction,
        removed,
        class_percentages: [100.0 * c0 as f64 / m, 100.0 * c1 as f64 / m],
        imbalance_degree: imbalance_ratio(c0.min(c1), c0.max(c1)),
        metrics,
        acceptable: true,
    }
}

/// Removes each fraction of the target class from `train` (ordered by the
/// silhouette `report` computed once on `train`), trains on the reduced set
/// and evaluates on `holdout` plus the removed rows. Iteration 0 uses the
/// full training set as the baseline. The IDft is the first iteration that
/// `acceptable(baseline, current)` rejects.
pub fn idft_sweep<E, P>(
    train: &Dataset,
    holdout: &Dataset,
    report: &SilhouetteReport,
    config: &SweepConfig,
    evaluator: E,
    acceptable: P,
) -> Result<SweepResult>
where
    E: Fn(&Dataset, &Dataset) -> Result<MetricsReport>,
    P: Fn(&MetricSummary, &MetricSummary) -> bool,
{
    validate_fractions(&config.fractions)?;
    let target = match config.target {
        Some(t) if usize::from(t) < train.class_names().len() => t,
        Some(t) => return Err(Error::invalid(format!("unknown target class tag {t}"))),
        None => crate::data::class_counts(train)?.minority,
    };
    let at = |index: usize, r: Result<MetricsReport>| r.map_err(|e| Error::Iteration { index, source: Box::new(e) });

    let base = at(0, evaluator(train, holdout))?.summary();
    let baseline = record(0, 0.0, 0, train, base);
    let order = removal_order(train, report, target, config.order, config.seed)?;
    let class_count = order.len();

    let mut records = Vec::with_capacity(config.fractions.len());
    let mut idft = None;
    for (k, &fraction) in config.fractions.iter().enumerate() {
        let iteration = k + 1;
        let plan = RemovalPlan { target, fraction, order: config.order, seed: config.seed };
        let removal = remove_fraction(train, &plan, report).map_err(|e| Error::Iteration { index: iteration, source: Box::new(e) })?;
        debug_assert_eq!(removal.removed_indices, order[..removal_count(fraction, class_count)]);
        let eval = match &removal.removed {
            Some(removed) => holdout.concat(removed)?,
            None => holdout.clone(),
        };
        let metrics = at(iteration, evaluator(&removal.reduced, &eval))?.summary();
        let mut rec = record(iteration, fraction, removal.removed_indices.len(), &removal.reduced, metrics);
        rec.acceptable = acceptable(&base, &metrics);
        if !rec.acceptable && idft.is_none() {
            idft = Some(Idft { iteration, fraction, imbalance_degree: rec.imbalance_degree });
        }
        records.push(rec);
    }
    Ok(SweepResult {
        class_names: train.class_names().to_vec(),
        target,
        order: config.order,
        baseline,
        records,
        idft,
    })
}

/// Cross-validated sweep: each stratified fold serves once as the holdout,
/// the silhouette is computed on the remaining folds, and per-iteration
/// metrics, shares and imbalance degrees are averaged over folds. The IDft is
/// located on the averaged metrics.
pub fn idft_sweep_cv<E, P>(
    d: &Dataset,
    folds: usize,
    bins: (f64, f64),
    config: &SweepConfig,
    evaluator: E,
    acceptable: P,
) -> Result<SweepResult>
where
    E: Fn(&Dataset, &Dataset) -> Result<MetricsReport> + Sync,
    P: Fn(&MetricSummary, &MetricSummary) -> bool,
{
    let fold_indices = stratified_folds(d.labels(), folds, config.seed)?;
    let target = match config.target {
        Some(t) => t,
        None => crate::data::class_counts(d)?.minority,
    };
    let config = SweepConfig { target: Some(target), ..config.clone() };
    let runs = (0..folds)
        .into_par_iter()
        .map(|f| {
            let train_idx: Vec<usize> = fold_indices
                .iter()
                .enumerate()
                .filter(|&(g, _)| g != f)
                .flat_map(|(_, idx)| idx.iter().copied())
                .collect();
            let train = d.subset(&train_idx)?;
            let holdout = d.subset(&fold_indices[f])?;
            let report = silhouette_report(&train, bins)?;
            idft_sweep(&train, &holdout, &report, &config, &evaluator, |_: &MetricSummary, _: &MetricSummary| true)
        })
        .collect::<Result<Vec<_>>>()?;

    let average = |pick: &dyn Fn(&SweepResult) -> &SweepRecord| -> SweepRecord {
        let recs: Vec<&SweepRecord> = runs.iter().map(pick).collect();
        let k = recs.len() as f64;
        let summaries: Vec<MetricSummary> = recs.iter().map(|r| r.metrics).collect();
        SweepRecord {
            iteration: recs[0].iteration,
            fraction: recs[0].fraction,
            removed: recs.iter().map(|r| r.removed).sum::<usize>() / recs.len(),
            class_percentages: [0, 1].map(|t| recs.iter().map(|r| r.class_percentages[t]).sum::<f64>() / k),
            imbalance_degree: recs.iter().map(|r| r.imbalance_degree).sum::<f64>() / k,
            metrics: MetricSummary::mean(&summaries).expect("at least two folds"),
            acceptable: true,
        }
    };
    let baseline = average(&|r| &r.baseline);
    let mut records: Vec<SweepRecord> = (0..config.fractions.len()).map(|i| average(&|r| &r.records[i])).collect();
    let mut idft = None;
    for rec in &mut records {
        rec.acceptable = acceptable(&baseline.metrics, &rec.metrics);
        if !rec.acceptable && idft.is_none() {
            idft = Some(Idft { iteration: rec.iteration, fraction: rec.fraction, imbalance_degree: rec.imbalance_degree });
        }
    }
    Ok(SweepResult {
        class_names: d.class_names().to_vec(),
        target,
        order: config.order,
        baseline,
        records,
        idft,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_synthetic_dataset, SyntheticSpec};
    use crate::evaluator::classification_metrics;
    use crate::silhouette::DEFAULT_BINS;

    fn data() -> Dataset {
        make_synthetic_dataset(&SyntheticSpec::separable(2, 20, 40, 3.0, 7)).unwrap()
    }

    #[test]
    fn zero_fraction_is_identity() {
        let d = data();
        let rep = silhouette_report(&d, DEFAULT_BINS).unwrap();
        let plan = RemovalPlan { target: 1, fraction: 0.0, order: RemovalOrder::Descending, seed: 0 };
        let r = remove_fraction(&d, &plan, &rep).unwrap();
        assert_eq!(r.reduced.n_samples(), d.n_samples());
        assert!(r.removed_indices.is_empty());
        assert!(r.removed.is_none());
    }

    #[test]
    fn descending_removes_highest_silhouettes() {
        let d = data();
        let rep = silhouette_report(&d, DEFAULT_BINS).unwrap();
        let minority = d.class_indices(1);
        assert_eq!(minority.len(), 20);
        let plan = RemovalPlan { target: 1, fraction: 0.25, order: RemovalOrder::Descending, seed: 0 };
        let r = remove_fraction(&d, &plan, &rep).unwrap();
        assert_eq!(r.removed_indices.len(), 5);
        let mut by_s = minority.clone();
        by_s.sort_by(|&a, &b| rep.coefficients[b].partial_cmp(&rep.coefficients[a]).unwrap());
        let mut expect = by_s[..5].to_vec();
        let mut got = r.removed_indices.clone();
        expect.sort_unstable();
        got.sort_unstable();
        assert_eq!(got, expect);
        let min_removed = got.iter().map(|&i| rep.coefficients[i]).fold(f64::INFINITY, f64::min);
        let max_kept = minority
            .iter()
            .filter(|i| !got.contains(i))
            .map(|&i| rep.coefficients[i])
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(min_removed >= max_kept);
        assert_eq!(r.reduced.n_samples() + r.removed.unwrap().n_samples(), d.n_samples());
    }

    #[test]
    fn removed_counts_follow_floor() {
        let d = make_synthetic_dataset(&SyntheticSpec::separable(2, 37, 40, 3.0, 1)).unwrap();
        let rep = silhouette_report(&d, DEFAULT_BINS).unwrap();
        for k in 1..=19 {
            let plan = RemovalPlan { target: 1, fraction: k as f64 / 20.0, order: RemovalOrder::Random, seed: 3 };
            let r = remove_fraction(&d, &plan, &rep).unwrap();
            assert_eq!(r.removed_indices.len(), k * 37 / 20);
        }
    }

    #[test]
    fn removing_whole_class_is_an_error() {
        let d = data();
        let rep = silhouette_report(&d, DEFAULT_BINS).unwrap();
        let plan = RemovalPlan { target: 1, fraction: 1.0, order: RemovalOrder::Ascending, seed: 0 };
        assert!(remove_fraction(&d, &plan, &rep).is_err());
    }

    #[test]
    fn reduced_union_removed_is_original_multiset() {
        let d = data();
        let rep = silhouette_report(&d, DEFAULT_BINS).unwrap();
        let plan = RemovalPlan { target: 0, fraction: 0.4, order: RemovalOrder::Random, seed: 9 };
        let r = remove_fraction(&d, &plan, &rep).unwrap();
        let key = |row: &[f64]| row.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        let mut a: Vec<_> = d.samples().iter_rows().map(key).collect();
        let mut b: Vec<_> = r.reduced.samples().iter_rows().chain(r.removed.as_ref().unwrap().samples().iter_rows()).map(key).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    /// Predicts the training majority for everything.
    fn majority_vote(train: &Dataset, eval: &Dataset) -> Result<MetricsReport> {
        let guess = u8::from(train.count_of(1) > train.count_of(0));
        let probs: Vec<f64> = eval.labels().iter().map(|_| if guess == 1 { 0.9 } else { 0.1 }).collect();
        let truth: Vec<bool> = eval.labels().iter().map(|&t| t == 1).collect();
        classification_metrics(&probs, &truth, 0.5)
    }

    #[test]
    fn vacuous_predicate_records_everything() {
        let d = make_synthetic_dataset(&SyntheticSpec::separable(2, 60, 60, 3.0, 2)).unwrap();
        let (train, holdout) = (d.subset(&(0..100).collect::<Vec<_>>()).unwrap(), d.subset(&(100..120).collect::<Vec<_>>()).unwrap());
        let rep = silhouette_report(&train, DEFAULT_BINS).unwrap();
        let cfg = SweepConfig { target: Some(0), ..SweepConfig::default() };
        let r = idft_sweep(&train, &holdout, &rep, &cfg, majority_vote, |_: &MetricSummary, _: &MetricSummary| true).unwrap();
        assert_eq!(r.records.len(), 19);
        assert!(r.idft.is_none());
        assert_eq!(r.cliff_fraction(), 1.0);
    }

    #[test]
    fn crippled_evaluator_idft_matches_offline_recount() {
        let d = make_synthetic_dataset(&SyntheticSpec::separable(2, 60, 60, 3.0, 2)).unwrap();
        let idx: Vec<usize> = (0..120).collect();
        let holdout_idx: Vec<usize> = idx.iter().copied().filter(|i| i % 6 == 0).collect();
        let train_idx: Vec<usize> = idx.iter().copied().filter(|i| i % 6 != 0).collect();
        let train = d.subset(&train_idx).unwrap();
        let holdout = d.subset(&holdout_idx).unwrap();
        let rep = silhouette_report(&train, DEFAULT_BINS).unwrap();
        let target = 1;
        let cfg = SweepConfig { target: Some(target), ..SweepConfig::default() };
        // acceptable while minority recall stays positive
        let pred = |_: &MetricSummary, m: &MetricSummary| m.recall > 0.0;
        let r = idft_sweep(&train, &holdout, &rep, &cfg, majority_vote, pred).unwrap();

        // offline: the vote flips once the target becomes strictly smaller
        let c = train.count_of(target);
        let other = train.count_of(1 - target);
        let first_fail = cfg
            .fractions
            .iter()
            .position(|&f| c - removal_count(f, c) < other)
            .unwrap()
            + 1;
        // 1-based iteration; with 50/50 train the tie goes to tag 0 from the start
        let expected = if c > other { first_fail } else { 1 };
        assert_eq!(r.idft.unwrap().iteration, expected);
        let rec = &r.records[expected - 1];
        assert_eq!(rec.metrics.recall, 0.0);
        assert!(!rec.acceptable);
    }

    #[test]
    fn imbalance_degree_strictly_decreases() {
        let d = make_synthetic_dataset(&SyntheticSpec::separable(2, 100, 100, 2.0, 4)).unwrap();
        let rep = silhouette_report(&d, DEFAULT_BINS).unwrap();
        let holdout = d.subset(&[0, 150]).unwrap();
        let cfg = SweepConfig { target: Some(1), ..SweepConfig::default() };
        let r = idft_sweep(&d, &holdout, &rep, &cfg, majority_vote, relative_f_measure).unwrap();
        assert!(r.records.windows(2).all(|w| w[1].imbalance_degree < w[0].imbalance_degree));
        let again = idft_sweep(&d, &holdout, &rep, &cfg, majority_vote, relative_f_measure).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn evaluator_failure_carries_iteration() {
        let d = data();
        let rep = silhouette_report(&d, DEFAULT_BINS).unwrap();
        let cfg = SweepConfig { fractions: vec![0.5], target: Some(1), ..SweepConfig::default() };
        let failing = |train: &Dataset, _: &Dataset| -> Result<MetricsReport> {
            if train.n_samples() < d.n_samples() {
                Err(Error::invalid("boom"))
            } else {
                majority_vote(train, train)
            }
        };
        let err = idft_sweep(&d, &d, &rep, &cfg, failing, relative_f_measure).unwrap_err();
        assert!(matches!(err, Error::Iteration { index: 1, .. }));
        let bad = SweepConfig { fractions: vec![0.5, 0.2], ..cfg };
        assert!(idft_sweep(&d, &d, &rep, &bad, majority_vote, relative_f_measure).is_err());
    }

    #[test]
    fn cross_validated_sweep_averages_folds() {
        let d = make_synthetic_dataset(&SyntheticSpec::separable(2, 50, 50, 3.0, 5)).unwrap();
        let cfg = SweepConfig { fractions: vec![0.2, 0.6], target: Some(1), ..SweepConfig::default() };
        let r = idft_sweep_cv(&d, 5, DEFAULT_BINS, &cfg, majority_vote, relative_f_measure).unwrap();
        assert_eq!(r.records.len(), 2);
        assert!((r.records[0].class_percentages.iter().sum::<f64>() - 100.0).abs() < 1e-9);
    }
}
