//! Silhouette coefficients over the supervised class partition.
//!
//! For a sample `t` in class `C_i`, `a(t)` is its mean distance to the other
//! members of `C_i` and `b(t)` the smallest mean distance to any other class.
//! `s(t) = (b - a) / max(a, b)`, except that singleton classes get 0. When
//! `a = b` (including the cross-class duplicate case `a = b = 0`) the sample
//! sits on the boundary and gets 0 as well.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Tag};
use crate::error::{Error, Result};
use crate::neighbors::distance;

/// Default bin edges: the range [-1, 1] cut into thirds.
pub const DEFAULT_BINS: (f64, f64) = (-1.0 / 3.0, 1.0 / 3.0);

/// Sums and counts of distances from `t` to every class (excluding `t`).
fn class_distance_sums(d: &Dataset, t: usize) -> [(f64, usize); 2] {
    let q = d.row(t);
    let mut acc = [(0.0, 0usize); 2];
    for (j, (row, &tag)) in d.samples().iter_rows().zip(d.labels()).enumerate() {
        if j == t {
            continue;
        }
        let slot = &mut acc[tag as usize];
        slot.0 += distance(q, row);
        slot.1 += 1;
    }
    acc
}

fn check_index(d: &Dataset, t: usize) -> Result<()> {
    if t >= d.n_samples() {
        return Err(Error::invalid(format!(
            "sample index {t} out of range ({} samples)",
            d.n_samples()
        )));
    }
    Ok(())
}

/// `a(t)`. Fails with [`Error::SingletonClass`] when `t` is alone in its class.
pub fn intra_dissimilarity(d: &Dataset, t: usize) -> Result<f64> {
    check_index(d, t)?;
    let (sum, count) = class_distance_sums(d, t)[d.labels()[t] as usize];
    if count == 0 {
        return Err(Error::SingletonClass(t));
    }
    Ok(sum / count as f64)
}

/// `b(t)`: the smallest mean distance from `t` to a non-empty other class.
pub fn inter_dissimilarity(d: &Dataset, t: usize) -> Result<f64> {
    check_index(d, t)?;
    let own = d.labels()[t] as usize;
    class_distance_sums(d, t)
        .iter()
        .enumerate()
        .filter(|(c, (_, n))| *c != own && *n > 0)
        .map(|(_, (s, n))| s / *n as f64)
        .min_by(f64::total_cmp)
        .ok_or(Error::SingleClass)
}

fn coefficient_from(own: (f64, usize), other: Option<f64>) -> Result<f64> {
    let b = other.ok_or(Error::SingleClass)?;
    if own.1 == 0 {
        return Ok(0.0);
    }
    let a = own.0 / own.1 as f64;
    if a == b {
        return Ok(0.0);
    }
    Ok((b - a) / a.max(b))
}

fn coefficient_at(d: &Dataset, t: usize) -> Result<f64> {
    let sums = class_distance_sums(d, t);
    let own = d.labels()[t] as usize;
    let other = sums
        .iter()
        .enumerate()
        .filter(|(c, (_, n))| *c != own && *n > 0)
        .map(|(_, (s, n))| s / *n as f64)
        .min_by(f64::total_cmp);
    coefficient_from(sums[own], other)
}

pub fn silhouette_coefficient(d: &Dataset, t: usize) -> Result<f64> {
    check_index(d, t)?;
    coefficient_at(d, t)
}

/// Coefficients of every sample, computed in parallel. Each sample's sums are
/// accumulated sequentially, so results do not depend on scheduling.
pub fn silhouette_coefficients(d: &Dataset) -> Result<Vec<f64>> {
    if d.class_names().len() < 2 || d.count_of(0) == 0 || d.count_of(1) == 0 {
        return Err(Error::SingleClass);
    }
    (0..d.n_samples())
        .into_par_iter()
        .map(|t| coefficient_at(d, t))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSummary {
    pub thresholds: (f64, f64),
    /// Samples with `s < lo`, `lo <= s <= hi`, `s > hi`.
    pub counts: [usize; 3],
    pub fractions: [f64; 3],
}

impl BinSummary {
    pub fn from_coefficients(coefficients: &[f64], thresholds: (f64, f64)) -> Result<Self> {
        let (lo, hi) = thresholds;
        if !(-1.0 < lo && lo < hi && hi < 1.0) {
            return Err(Error::invalid(format!(
                "bin thresholds must satisfy -1 < lo < hi < 1, got ({lo}, {hi})"
            )));
        }
        if coefficients.is_empty() {
            return Err(Error::Empty("no coefficients to bin".into()));
        }
        let mut counts = [0usize; 3];
        for &s in coefficients {
            let bin = if s < lo {
                0
            } else if s <= hi {
                1
            } else {
                2
            };
            counts[bin] += 1;
        }
        let m = coefficients.len() as f64;
        Ok(Self {
            thresholds,
            counts,
            fractions: counts.map(|c| c as f64 / m),
        })
    }

    /// Bin shares as percentages rounded to two decimals.
    pub fn percentages(&self) -> [f64; 3] {
        self.fractions.map(|f| (f * 10_000.0).round() / 100.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSilhouette {
    pub label: String,
    pub count: usize,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SilhouetteReport {
    pub coefficients: Vec<f64>,
    pub labels: Vec<Tag>,
    pub per_class_mean: Vec<ClassSilhouette>,
    pub bins: BinSummary,
}

impl SilhouetteReport {
    pub fn bin_of(&self, t: usize) -> usize {
        let s = self.coefficients[t];
        let (lo, hi) = self.bins.thresholds;
        if s < lo {
            0
        } else if s <= hi {
            1
        } else {
            2
        }
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

pub fn silhouette_report(d: &Dataset, bin_thresholds: (f64, f64)) -> Result<SilhouetteReport> {
    // Validate thresholds before the quadratic pass.
    BinSummary::from_coefficients(&[0.0], bin_thresholds)?;
    let coefficients = silhouette_coefficients(d)?;
    let bins = BinSummary::from_coefficients(&coefficients, bin_thresholds)?;
    let per_class_mean = d
        .class_names()
        .iter()
        .zip(0..)
        .map(|(name, tag): (&String, Tag)| {
            let (sum, count) = coefficients
                .iter()
                .zip(d.labels())
                .filter(|(_, &t)| t == tag)
                .fold((0.0, 0usize), |(s, c), (v, _)| (s + v, c + 1));
            ClassSilhouette {
                label: name.clone(),
                count,
                mean: if count > 0 { sum / count as f64 } else { 0.0 },
            }
        })
        .collect();
    Ok(SilhouetteReport {
        coefficients,
        labels: d.labels().to_vec(),
        per_class_mean,
        bins,
    })
}

/// Per-sample weights `w_i = (s_max - s_i) / (s_max - s_min)`: 1 for the
/// lowest silhouette, 0 for the highest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GourmetWeights {
    pub weights: Vec<f64>,
    pub silh_max: f64,
    pub silh_min: f64,
}

pub fn gourmet_weights_from(coefficients: &[f64]) -> Result<GourmetWeights> {
    if coefficients.is_empty() {
        return Err(Error::Empty("no coefficients to weight".into()));
    }
    let silh_max = coefficients.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let silh_min = coefficients.iter().copied().fold(f64::INFINITY, f64::min);
    if silh_max == silh_min {
        return Err(Error::DegenerateWeighting(silh_max));
    }
    let span = silh_max - silh_min;
    let weights = coefficients
        .iter()
        .map(|&s| ((silh_max - s) / span).clamp(0.0, 1.0))
        .collect();
    Ok(GourmetWeights { weights, silh_max, silh_min })
}

pub fn gourmet_weights(report: &SilhouetteReport) -> Result<GourmetWeights> {
    gourmet_weights_from(&report.coefficients)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng;

    fn ds(rows: &[&[f64]], labels: &[&str]) -> Dataset {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        Dataset::from_named_labels(Matrix::from_rows(&rows).unwrap(), labels).unwrap()
    }

    fn random_dataset(seed: u64, m: usize, n: usize) -> Dataset {
        let mut rng = seeded(seed);
        let rows: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let mut labels: Vec<&str> = (0..m).map(|_| if rng.gen_bool(0.4) { "a" } else { "b" }).collect();
        labels[0] = "a";
        labels[1] = "b";
        Dataset::from_named_labels(Matrix::from_rows(&rows).unwrap(), &labels).unwrap()
    }

    /// Straight transcription of the piecewise definition over a full
    /// pairwise distance matrix.
    fn brute_force(d: &Dataset) -> Vec<f64> {
        let m = d.n_samples();
        let dist: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| {
                d.row(i).iter().zip(d.row(j)).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
            }).collect())
            .collect();
        (0..m)
            .map(|t| {
                let own = d.labels()[t];
                let same: Vec<usize> = (0..m).filter(|&j| j != t && d.labels()[j] == own).collect();
                let other: Vec<usize> = (0..m).filter(|&j| d.labels()[j] != own).collect();
                if same.is_empty() {
                    return 0.0;
                }
                let a = same.iter().map(|&j| dist[t][j]).sum::<f64>() / same.len() as f64;
                let b = other.iter().map(|&j| dist[t][j]).sum::<f64>() / other.len() as f64;
                if a == b { 0.0 } else { (b - a) / a.max(b) }
            })
            .collect()
    }

    #[test]
    fn single_companion_and_duplicates() {
        let d = ds(&[&[0.0, 0.0], &[3.0, 4.0], &[10.0, 0.0]], &["x", "x", "y"]);
        assert_eq!(intra_dissimilarity(&d, 0).unwrap(), 5.0);
        assert_eq!(inter_dissimilarity(&d, 0).unwrap(), 10.0);
        let dup = ds(&[&[1.0], &[1.0], &[9.0]], &["x", "x", "y"]);
        assert_eq!(intra_dissimilarity(&dup, 0).unwrap(), 0.0);
        assert_eq!(silhouette_coefficient(&dup, 0).unwrap(), 1.0);
    }

    #[test]
    fn singleton_class_is_zero() {
        let d = ds(&[&[0.0], &[1.0], &[5.0]], &["x", "x", "y"]);
        assert!(matches!(intra_dissimilarity(&d, 2), Err(Error::SingletonClass(2))));
        assert_eq!(silhouette_coefficient(&d, 2).unwrap(), 0.0);
    }

    #[test]
    fn equidistant_from_other_class() {
        let d = ds(&[&[0.0, 0.0], &[2.0, 0.0], &[-2.0, 0.0], &[0.0, 2.0]], &["x", "y", "y", "y"]);
        assert_eq!(inter_dissimilarity(&d, 0).unwrap(), 2.0);
    }

    #[test]
    fn cross_class_duplicate_is_zero() {
        let d = ds(&[&[1.0], &[1.0], &[1.0], &[1.0]], &["x", "x", "y", "y"]);
        for t in 0..4 {
            assert_eq!(silhouette_coefficient(&d, t).unwrap(), 0.0);
        }
    }

    #[test]
    fn single_class_rejected() {
        let d = ds(&[&[0.0], &[1.0]], &["x", "x"]);
        assert!(silhouette_coefficient(&d, 0).is_err());
        assert!(inter_dissimilarity(&d, 0).is_err());
        assert!(silhouette_coefficients(&d).is_err());
        assert!(silhouette_coefficient(&d, 9).is_err());
    }

    #[test]
    fn summation_oracles() {
        let d = random_dataset(4, 80, 3);
        for t in 0..80 {
            let own = d.labels()[t];
            let same: Vec<usize> = (0..80).filter(|&j| j != t && d.labels()[j] == own).collect();
            let other: Vec<usize> = (0..80).filter(|&j| d.labels()[j] != own).collect();
            let dist = |j: usize| euclid(d.row(t), d.row(j));
            let a = same.iter().map(|&j| dist(j)).sum::<f64>() / same.len() as f64;
            let b = other.iter().map(|&j| dist(j)).sum::<f64>() / other.len() as f64;
            assert!((intra_dissimilarity(&d, t).unwrap() - a).abs() < 1e-12);
            assert!((inter_dissimilarity(&d, t).unwrap() - b).abs() < 1e-12);
        }
    }

    fn euclid(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn matches_brute_force() {
        let d = random_dataset(8, 100, 4);
        let fast = silhouette_coefficients(&d).unwrap();
        for (t, (x, y)) in fast.iter().zip(brute_force(&d)).enumerate() {
            assert!((x - y).abs() < 1e-9, "sample {t}: {x} vs {y}");
            assert_eq!(*x, silhouette_coefficient(&d, t).unwrap());
        }
    }

    #[test]
    fn tight_far_clusters_land_in_top_bin() {
        let mut rows: Vec<&[f64]> = Vec::new();
        let pts: Vec<[f64; 2]> = (0..20)
            .map(|i| if i < 10 { [i as f64 * 0.01, 0.0] } else { [100.0 + i as f64 * 0.01, 0.0] })
            .collect();
        for p in &pts {
            rows.push(p);
        }
        let labels: Vec<&str> = (0..20).map(|i| if i < 10 { "x" } else { "y" }).collect();
        let r = silhouette_report(&ds(&rows, &labels), DEFAULT_BINS).unwrap();
        assert_eq!(r.bins.counts, [0, 0, 20]);
        assert_eq!(r.bins.fractions[2], 1.0);
        assert!(r.per_class_mean.iter().all(|c| c.mean > 0.99));
    }

    #[test]
    fn direct_binning() {
        let b = BinSummary::from_coefficients(&[-0.9, 0.1, 0.8], DEFAULT_BINS).unwrap();
        assert_eq!(b.counts, [1, 1, 1]);
        assert_eq!(b.percentages(), [33.33, 33.33, 33.33]);
        assert!(BinSummary::from_coefficients(&[0.0], (0.5, 0.2)).is_err());
        assert!(BinSummary::from_coefficients(&[0.0], (-1.0, 0.2)).is_err());
    }

    #[test]
    fn report_bins_match_recount() {
        let d = random_dataset(12, 90, 2);
        let r = silhouette_report(&d, (-0.1, 0.1)).unwrap();
        let oracle = brute_force(&d);
        let mut counts = [0; 3];
        for s in oracle {
            counts[if s < -0.1 { 0 } else if s <= 0.1 { 1 } else { 2 }] += 1;
        }
        assert_eq!(r.bins.counts, counts);
        assert!((r.bins.fractions.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((0..90).all(|t| r.bin_of(t) < 3));
    }

    #[test]
    fn gourmet_linear_map() {
        let w = gourmet_weights_from(&[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(w.weights, vec![1.0, 0.5, 0.0]);
        assert!(matches!(
            gourmet_weights_from(&[0.2, 0.2, 0.2]),
            Err(Error::DegenerateWeighting(_))
        ));
    }

    proptest! {
        #[test]
        fn gourmet_matches_affine_oracle(s in prop::collection::vec(-1f64..1.0, 2..50)) {
            let hi = s.iter().cloned().fold(f64::MIN, f64::max);
            let lo = s.iter().cloned().fold(f64::MAX, f64::min);
            prop_assume!(hi > lo);
            let w = gourmet_weights_from(&s).unwrap();
            for (i, wi) in w.weights.iter().enumerate() {
                prop_assert!((wi - (hi - s[i]) / (hi - lo)).abs() < 1e-12);
                prop_assert!((0.0..=1.0).contains(wi));
                for j in 0..s.len() {
                    if s[i] < s[j] {
                        prop_assert!(w.weights[i] > w.weights[j]);
                    }
                }
            }
            let imax = s.iter().position(|&v| v == hi).unwrap();
            let imin = s.iter().position(|&v| v == lo).unwrap();
            prop_assert_eq!(w.weights[imax], 0.0);
            prop_assert_eq!(w.weights[imin], 1.0);
        }

        #[test]
        fn coefficients_bounded_and_label_swap_invariant(seed in any::<u64>()) {
            let d = random_dataset(seed, 30, 2);
            let s = silhouette_coefficients(&d).unwrap();
            prop_assert!(s.iter().all(|v| (-1.0..=1.0).contains(v)));
            let swapped_names: Vec<&str> = d.labels().iter().map(|&t| if t == 0 { "b" } else { "a" }).collect();
            let swapped = Dataset::from_named_labels(d.samples().clone(), &swapped_names).unwrap();
            let s2 = silhouette_coefficients(&swapped).unwrap();
            for (x, y) in s.iter().zip(&s2) {
                prop_assert_eq!(x.abs(), y.abs());
            }
        }
    }
}
