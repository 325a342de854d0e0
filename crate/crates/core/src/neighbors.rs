//! Euclidean distance and brute-force nearest-neighbour queries.
//!
//! Every query is an exhaustive scan. Candidates are ordered by
//! `(distance, reference index)`, so equal-distance ties always resolve to the
//! lower reference index.

use std::cmp::Ordering;

use crate::data::{Dataset, Tag};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(distance(a, b))
}

#[inline]
pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[inline]
fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Immutable view over labelled reference points.
#[derive(Debug, Clone, Copy)]
pub struct NeighborIndex<'a> {
    samples: &'a Matrix,
    labels: &'a [Tag],
}

impl<'a> NeighborIndex<'a> {
    pub fn new(samples: &'a Matrix, labels: &'a [Tag]) -> Result<Self> {
        if samples.rows() == 0 {
            return Err(Error::Empty("neighbor index has no reference points".into()));
        }
        if labels.len() != samples.rows() {
            return Err(Error::DimensionMismatch {
                expected: samples.rows(),
                found: labels.len(),
            });
        }
        Ok(Self { samples, labels })
    }

    pub fn from_dataset(d: &'a Dataset) -> Self {
        Self {
            samples: d.samples(),
            labels: d.labels(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.samples.cols()
    }

    fn check_query(&self, query: &[f64]) -> Result<()> {
        if query.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: query.len(),
            });
        }
        Ok(())
    }

    /// The `k` nearest references as `(distance, index)`, closest first,
    /// optionally skipping one reference (typically the query itself).
    pub fn nearest(&self, query: &[f64], k: usize, exclude: Option<usize>) -> Result<Vec<(f64, usize)>> {
        self.check_query(query)?;
        let available = self.len() - usize::from(exclude.is_some_and(|e| e < self.len()));
        if k == 0 || k > available {
            return Err(Error::invalid(format!(
                "k = {k} must be in 1..={available}"
            )));
        }
        let mut all: Vec<(f64, usize)> = self
            .samples
            .iter_rows()
            .enumerate()
            .filter(|(i, _)| Some(*i) != exclude)
            .map(|(i, r)| (distance(query, r), i))
            .collect();
        if k < all.len() {
            all.select_nth_unstable_by(k - 1, by_distance_then_index);
            all.truncate(k);
        }
        all.sort_by(by_distance_then_index);
        Ok(all)
    }

    /// Majority label among the `k` nearest references. `k` must be odd.
    pub fn knn_classify(&self, query: &[f64], k: usize) -> Result<Tag> {
        if k.is_multiple_of(2) {
            return Err(Error::invalid(format!("k must be odd, got {k}")));
        }
        let neighbors = self.nearest(query, k, None)?;
        let mut votes = [0usize; 2];
        for &(_, i) in &neighbors {
            votes[self.labels[i] as usize] += 1;
        }
        Ok(if votes[1] > votes[0] { 1 } else { 0 })
    }

    /// Index of the single nearest reference.
    pub fn nn1_index(&self, query: &[f64]) -> Result<usize> {
        self.check_query(query)?;
        let mut best = (f64::INFINITY, usize::MAX);
        for (i, r) in self.samples.iter_rows().enumerate() {
            let d = distance(query, r);
            if d < best.0 || best.1 == usize::MAX {
                best = (d, i);
            }
        }
        Ok(best.1)
    }

    pub fn nn1_classify(&self, query: &[f64]) -> Result<Tag> {
        self.nn1_index(query).map(|i| self.labels[i])
    }
}

/// For every row, the indices of its `k` nearest other rows (closest first).
pub(crate) fn neighbor_lists(samples: &Matrix, k: usize) -> Result<Vec<Vec<usize>>> {
    let dummy = vec![0; samples.rows()];
    let index = NeighborIndex::new(samples, &dummy)?;
    (0..samples.rows())
        .map(|i| {
            index
                .nearest(samples.row(i), k, Some(i))
                .map(|v| v.into_iter().map(|(_, j)| j).collect())
        })
        .collect()
}
