use rand::Rng;
use serde::{Deserialize, Serialize};

use super::smote::interpolate;
use super::{Algorithm, SyntheticBatch};
use crate::data::largest_remainder;
use crate::data::{class_counts, Dataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::neighbors::{neighbor_lists, NeighborIndex};
use crate::rng::{derive_seed, seeded};

/// Per-minority-sample generation quotas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdasynAllocation {
    /// Dataset rows of the minority samples, ascending.
    pub minority_indices: Vec<usize>,
    /// Majority neighbours among the `k` nearest (all classes, self excluded).
    pub majority_neighbors: Vec<usize>,
    /// Normalized ratios; uniform when no minority sample has a majority neighbour.
    pub ratios: Vec<f64>,
    pub quotas: Vec<usize>,
}

/// Quotas proportional to `r_i = Δ_i / k`, rounded by largest remainder
/// (ties to the lower index) so they sum to exactly `g`.
pub fn adasyn_allocation(d: &Dataset, k: usize, g: usize) -> Result<AdasynAllocation> {
    let counts = class_counts(d)?;
    let m = d.n_samples();
    if k == 0 || k > m - 1 {
        return Err(Error::invalid(format!("ADASYN needs 1 <= k <= {}, got k = {k}", m - 1)));
    }
    let index = NeighborIndex::from_dataset(d);
    let minority_indices = d.class_indices(counts.minority);
    let majority_neighbors = minority_indices
        .iter()
        .map(|&i| {
            index
                .nearest(d.row(i), k, Some(i))
                .map(|nn| nn.iter().filter(|&&(_, j)| d.labels()[j] == counts.majority).count())
        })
        .collect::<Result<Vec<usize>>>()?;
    let total: usize = majority_neighbors.iter().sum();
    let (ratios, quotas) = if total == 0 {
        let n = minority_indices.len();
        (vec![1.0 / n as f64; n], largest_remainder(&vec![1; n], g))
    } else {
        (
            majority_neighbors.iter().map(|&c| c as f64 / total as f64).collect(),
            largest_remainder(&majority_neighbors, g),
        )
    };
    Ok(AdasynAllocation { minority_indices, majority_neighbors, ratios, quotas })
}

/// SMOTE-style interpolation with `g_i` points seeded from minority sample `i`.
/// Partners come from the `min(k, m_min - 1)` nearest minority neighbours.
pub fn adasyn(d: &Dataset, k: usize, g: usize, seed: u64) -> Result<SyntheticBatch> {
    if g == 0 {
        return Ok(SyntheticBatch::empty(d.n_features(), Algorithm::Adasyn, seed));
    }
    let alloc = adasyn_allocation(d, k, g)?;
    let minority = d.samples().select_rows(&alloc.minority_indices);
    if minority.rows() < 2 {
        return Err(Error::invalid("ADASYN needs at least two minority samples"));
    }
    let kk = k.min(minority.rows() - 1);
    let lists = neighbor_lists(&minority, kk)?;
    let mut rng = seeded(derive_seed(seed, 0xADA5));
    let mut out = Matrix::with_cols(d.n_features());
    for (i, &q) in alloc.quotas.iter().enumerate() {
        for _ in 0..q {
            let u = lists[i][rng.gen_range(0..kk)];
            let w: f64 = rng.gen();
            out.push_row(&interpolate(minority.row(i), minority.row(u), w))?;
        }
    }
    Ok(SyntheticBatch::unfiltered(out, Algorithm::Adasyn, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_synthetic_dataset, SyntheticSpec};

    fn ds(rows: &[[f64; 1]], labels: &[&str]) -> Dataset {
        Dataset::from_named_labels(Matrix::from_rows(rows).unwrap(), labels).unwrap()
    }

    #[test]
    fn deep_minority_falls_back_to_uniform() {
        let d = make_synthetic_dataset(&SyntheticSpec::separable(2, 10, 30, 50.0, 1)).unwrap();
        let a = adasyn_allocation(&d, 3, 25).unwrap();
        assert!(a.majority_neighbors.iter().all(|&c| c == 0));
        assert_eq!(a.quotas.iter().sum::<usize>(), 25);
        assert!(a.quotas.iter().all(|&q| q == 2 || q == 3));
    }

    #[test]
    fn proportional_quotas() {
        // minority at 0 and 10; majority clustered around 10
        let d = ds(
            &[[0.0], [0.5], [10.0], [10.2], [10.4], [10.6]],
            &["min", "maj", "min", "maj", "maj", "maj"],
        );
        let a = adasyn_allocation(&d, 1, 10).unwrap();
        assert_eq!(a.majority_neighbors, vec![1, 1]);
        assert_eq!(a.quotas, vec![5, 5]);
        let d = ds(
            &[[-5.0], [-4.9], [10.0], [10.2], [10.4], [10.6], [10.8]],
            &["min", "min", "min", "maj", "maj", "maj", "maj"],
        );
        let a = adasyn_allocation(&d, 1, 10).unwrap();
        assert_eq!(a.majority_neighbors, vec![0, 0, 1]);
        assert_eq!(a.quotas, vec![0, 0, 10]);
        let b = adasyn(&d, 1, 10, 4).unwrap();
        // every point interpolates from 10.0 towards its only minority neighbour
        assert!(b.samples.iter_rows().all(|r| (-4.9..=10.0).contains(&r[0])));
    }

    #[test]
    fn empty_request() {
        let d = make_synthetic_dataset(&SyntheticSpec::separable(2, 10, 30, 1.0, 1)).unwrap();
        assert!(adasyn(&d, 5, 0, 0).unwrap().is_empty());
        assert_eq!(adasyn(&d, 5, 33, 0).unwrap().len(), 33);
        assert!(adasyn_allocation(&d, 40, 3).is_err());
    }
}
