use std::collections::HashSet;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{Algorithm, SyntheticBatch};
use crate::data::FeatureStats;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};

pub const DEFAULT_ATTEMPTS_FACTOR: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrngSpec {
    /// Samples to accept.
    pub count: usize,
    pub stats: FeatureStats,
    /// Attempts allowed per requested sample.
    pub max_attempts_factor: usize,
}

/// Bit pattern of a row; equal keys mean bitwise-identical vectors.
pub fn row_key(row: &[f64]) -> Vec<u64> {
    row.iter().map(|v| v.to_bits()).collect()
}

/// Draws candidates feature-wise from `N(μ_f, σ_f)` until `spec.count` are
/// kept. A candidate is kept when `acceptor` accepts it, it is not already in
/// the batch and `fresh` reports it new. Stops with
/// [`Error::BudgetExhausted`] (carrying the partial batch) after
/// `max_attempts_factor × count` draws.
pub fn grng<A, F>(spec: &GrngSpec, mut acceptor: A, mut fresh: F, algorithm: Algorithm, seed: u64) -> Result<SyntheticBatch>
where
    A: FnMut(&[f64]) -> bool,
    F: FnMut(&[f64]) -> bool,
{
    let n = spec.stats.n_features();
    if n == 0 || spec.stats.std_devs.len() != n {
        return Err(Error::invalid("generator statistics are empty or inconsistent"));
    }
    if spec.stats.std_devs.iter().any(|s| !(s.is_finite() && *s >= 0.0)) || spec.stats.means.iter().any(|m| !m.is_finite()) {
        return Err(Error::invalid("generator statistics must be finite with non-negative spread"));
    }
    if spec.max_attempts_factor == 0 {
        return Err(Error::Config("max_attempts_factor must be positive".into()));
    }
    let mut batch = SyntheticBatch::empty(n, algorithm, seed);
    if spec.count == 0 {
        return Ok(batch);
    }
    let budget = spec.max_attempts_factor.saturating_mul(spec.count);
    let mut rng = seeded(derive_seed(seed, 0x6A55));
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut candidate = vec![0.0; n];
    while batch.accepted < spec.count {
        if batch.attempts == budget {
            return Err(Error::BudgetExhausted { requested: spec.count, batch: Box::new(batch) });
        }
        batch.attempts += 1;
        for (j, c) in candidate.iter_mut().enumerate() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *c = spec.stats.means[j] + spec.stats.std_devs[j] * z;
        }
        if !acceptor(&candidate) {
            batch.rejected_by_1nn += 1;
            continue;
        }
        let key = row_key(&candidate);
        if seen.contains(&key) || !fresh(&candidate) {
            batch.rejected_duplicate += 1;
            continue;
        }
        seen.insert(key);
        batch.samples.push_row(&candidate)?;
        batch.accepted += 1;
    }
    Ok(batch)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(count: usize, sd: f64) -> GrngSpec {
        GrngSpec {
            count,
            stats: FeatureStats { means: vec![1.0, -1.0], std_devs: vec![sd, sd], weighted: false },
            max_attempts_factor: 10,
        }
    }

    #[test]
    fn no_rejection_means_one_attempt_each() {
        let b = grng(&spec(5, 1.0), |_| true, |_| true, Algorithm::G1no, 3).unwrap();
        assert_eq!((b.len(), b.accepted, b.attempts), (5, 5, 5));
    }

    #[test]
    fn reject_all_exhausts_budget() {
        match grng(&spec(5, 1.0), |_| false, |_| true, Algorithm::G1no, 3) {
            Err(Error::BudgetExhausted { requested, batch }) => {
                assert_eq!((requested, batch.accepted, batch.attempts, batch.rejected_by_1nn), (5, 0, 50, 50));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_spread_keeps_one_sample() {
        match grng(&spec(3, 0.0), |_| true, |_| true, Algorithm::G1no, 3) {
            Err(Error::BudgetExhausted { batch, .. }) => {
                assert_eq!(batch.accepted, 1);
                assert_eq!(batch.rejected_duplicate, 29);
                assert_eq!(batch.samples.row(0), &[1.0, -1.0]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn counters_add_up_and_acceptor_holds() {
        let b = grng(&spec(50, 1.0), |x| x[0] > 1.0, |_| true, Algorithm::G1no, 9).unwrap();
        assert_eq!(b.attempts, b.accepted + b.rejected_by_1nn + b.rejected_duplicate);
        assert!(b.samples.iter_rows().all(|r| r[0] > 1.0));
        assert_eq!(b, grng(&spec(50, 1.0), |x| x[0] > 1.0, |_| true, Algorithm::G1no, 9).unwrap());
    }
}
