use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{Dataset, Tag};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded, SeededRng};

/// Train/test partition followed by a validation carve-out of the training
/// part. The defaults are 85/15, then 15% of the training part for validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub test_fraction: f64,
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.85,
            test_fraction: 0.15,
            validation_fraction: 0.15,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, f) in [
            ("train_fraction", self.train_fraction),
            ("test_fraction", self.test_fraction),
            ("validation_fraction", self.validation_fraction),
        ] {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::invalid(format!("{name} must lie in (0, 1), got {f}")));
            }
        }
        if (self.train_fraction + self.test_fraction - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(
                "train_fraction and test_fraction must sum to 1",
            ));
        }
        Ok(())
    }
}

/// Sorted original row indices of each part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub learn: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

impl SplitIndices {
    /// Learning and validation parts together.
    pub fn train(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.learn.iter().chain(&self.validation).copied().collect();
        all.sort_unstable();
        all
    }
}

#[derive(Debug, Clone)]
pub struct SplitParts {
    pub learn: Dataset,
    pub validation: Dataset,
    pub test: Dataset,
    pub indices: SplitIndices,
}

impl SplitParts {
    pub fn train(&self) -> Dataset {
        self.learn.concat(&self.validation).expect("parts share a schema")
    }
}

/// Stratified, seeded split. Part sizes are rounded to the nearest integer
/// (70226 rows → 50738 / 8954 / 10534) and every class contributes to each
/// part within one sample of its proportional share.
pub fn split_indices(d: &Dataset, spec: &SplitSpec) -> Result<SplitIndices> {
    spec.validate()?;
    let all: Vec<usize> = (0..d.n_samples()).collect();
    let mut rng = seeded(derive_seed(spec.seed, 0x5917));
    let (train, test) = stratified_holdout(d.labels(), &all, spec.test_fraction, &mut rng);
    let (learn, validation) =
        stratified_holdout(d.labels(), &train, spec.validation_fraction, &mut rng);
    for (name, part) in [("test", &test), ("validation", &validation), ("learn", &learn)] {
        if part.is_empty() {
            return Err(Error::EmptySplitPart(name));
        }
    }
    Ok(SplitIndices { learn, validation, test })
}

pub fn split(d: &Dataset, spec: &SplitSpec) -> Result<SplitParts> {
    let indices = split_indices(d, spec)?;
    Ok(SplitParts {
        learn: d.subset(&indices.learn)?,
        validation: d.subset(&indices.validation)?,
        test: d.subset(&indices.test)?,
        indices,
    })
}

/// Splits `pool` into (kept, held-out). The held-out size is
/// `round(|pool| * fraction)`, shared among classes by largest remainder.
/// Both outputs are sorted ascending.
pub fn stratified_holdout(
    labels: &[Tag],
    pool: &[usize],
    fraction: f64,
    rng: &mut SeededRng,
) -> (Vec<usize>, Vec<usize>) {
    let total = pool.len();
    let target = ((total as f64) * fraction).round() as usize;
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for &i in pool {
        by_class[labels[i] as usize].push(i);
    }
    let quotas = largest_remainder(&[by_class[0].len(), by_class[1].len()], target);
    let mut kept = Vec::with_capacity(total - target);
    let mut held = Vec::with_capacity(target);
    for (members, quota) in by_class.iter_mut().zip(quotas) {
        members.shuffle(rng);
        held.extend_from_slice(&members[..quota]);
        kept.extend_from_slice(&members[quota..]);
    }
    kept.sort_unstable();
    held.sort_unstable();
    (kept, held)
}

/// Distributes `target` over groups proportionally to `sizes`, exactly, in
/// integer arithmetic. Ties in remainder favour the earlier group.
pub(crate) fn largest_remainder(sizes: &[usize], target: usize) -> Vec<usize> {
    let total: usize = sizes.iter().sum();
    if total == 0 {
        return vec![0; sizes.len()];
    }
    let mut quotas: Vec<usize> = sizes.iter().map(|&s| s * target / total).collect();
    let mut rest: Vec<(usize, usize)> = sizes
        .iter()
        .enumerate()
        .map(|(i, &s)| (s * target % total, i))
        .collect();
    rest.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let short = target - quotas.iter().sum::<usize>();
    for &(_, i) in rest.iter().take(short) {
        quotas[i] += 1;
    }
    quotas
}
