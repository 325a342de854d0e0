use rand::Rng;

use super::{Algorithm, SyntheticBatch};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::neighbors::neighbor_lists;
use crate::rng::{derive_seed, seeded};

pub const DEFAULT_K: usize = 5;

/// `(1 - w)·a + w·b`; returns `a` exactly at `w = 0` and `b` exactly at `w = 1`.
pub fn interpolate(a: &[f64], b: &[f64], w: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| (1.0 - w) * x + w * y).collect()
}

/// `g` points, each on the segment between a uniformly chosen minority row
/// and one of its `k` nearest minority neighbours.
pub fn smote(minority: &Matrix, k: usize, g: usize, seed: u64) -> Result<SyntheticBatch> {
    let m = minority.rows();
    if m == 0 {
        return Err(Error::Empty("minority class has no samples".into()));
    }
    if k == 0 || k >= m {
        return Err(Error::invalid(format!("SMOTE needs 1 <= k < minority count ({m}), got k = {k}")));
    }
    if g == 0 {
        return Ok(SyntheticBatch::empty(minority.cols(), Algorithm::Smote, seed));
    }
    let lists = neighbor_lists(minority, k)?;
    let mut rng = seeded(derive_seed(seed, 0x5307E));
    let mut out = Matrix::with_cols(minority.cols());
    for _ in 0..g {
        let i = rng.gen_range(0..m);
        let u = lists[i][rng.gen_range(0..k)];
        let w: f64 = rng.gen();
        out.push_row(&interpolate(minority.row(i), minority.row(u), w))?;
    }
    Ok(SyntheticBatch::unfiltered(out, Algorithm::Smote, seed))
}
