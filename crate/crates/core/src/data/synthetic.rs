//! Gaussian-mixture datasets for experiments and tests.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::split::largest_remainder;
use super::{default_feature_names, Dataset, Tag};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{derive_seed, seeded};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Covariance {
    /// Per-feature variances.
    Diagonal(Vec<f64>),
    /// Full symmetric positive semi-definite matrix, row by row.
    Full(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: Vec<f64>,
    pub covariance: Covariance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub label: String,
    pub count: usize,
    pub components: Vec<GaussianComponent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub classes: Vec<ClassSpec>,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Two isotropic unit-variance classes whose means differ by
    /// `separation` in every feature.
    pub fn separable(
        n_features: usize,
        minority_count: usize,
        majority_count: usize,
        separation: f64,
        seed: u64,
    ) -> Self {
        let unit = Covariance::Diagonal(vec![1.0; n_features]);
        Self {
            classes: vec![
                ClassSpec {
                    label: "majority".into(),
                    count: majority_count,
                    components: vec![GaussianComponent {
                        weight: 1.0,
                        mean: vec![0.0; n_features],
                        covariance: unit.clone(),
                    }],
                },
                ClassSpec {
                    label: "minority".into(),
                    count: minority_count,
                    components: vec![GaussianComponent {
                        weight: 1.0,
                        mean: vec![separation; n_features],
                        covariance: unit,
                    }],
                },
            ],
            seed,
        }
    }

    /// Eleven-feature, 4000-sample balanced mixture used by the bundled
    /// pipeline configuration and the end-to-end checks.
    ///
    /// "malware" is one isotropic blob at the origin. "legit" has a correlated
    /// core (70%) far out along the diagonal and a fringe (30%) just past the
    /// malware blob on the opposite side. Fringe members sit closer to the
    /// malware blob than to the rest of their class, so their silhouettes are
    /// low or negative while the core's are high.
    pub fn benchmark(seed: u64) -> Self {
        const N: usize = 11;
        let correlated = |var: f64, rho: f64| {
            Covariance::Full(
                (0..N)
                    .map(|i| (0..N).map(|j| if i == j { var } else { rho * var }).collect())
                    .collect(),
            )
        };
        Self {
            classes: vec![
                ClassSpec {
                    label: "malware".into(),
                    count: 2000,
                    components: vec![GaussianComponent {
                        weight: 1.0,
                        mean: vec![0.0; N],
                        covariance: Covariance::Diagonal(vec![1.0; N]),
                    }],
                },
                ClassSpec {
                    label: "legit".into(),
                    count: 2000,
                    components: vec![
                        GaussianComponent {
                            weight: 0.7,
                            mean: vec![2.5; N],
                            covariance: correlated(1.0, 0.5),
                        },
                        GaussianComponent {
                            weight: 0.3,
                            mean: vec![-1.2; N],
                            covariance: Covariance::Diagonal(vec![0.5; N]),
                        },
                    ],
                },
            ],
            seed,
        }
    }

    pub fn n_features(&self) -> Option<usize> {
        self.classes
            .first()
            .and_then(|c| c.components.first())
            .map(|c| c.mean.len())
    }
}

/// Draws every class from its mixture. Component sizes split the class
/// count by largest remainder over the component weights (scaled to
/// integers), so requested counts are met exactly. Rows are emitted class
/// by class, components in order.
pub fn make_synthetic_dataset(spec: &SyntheticSpec) -> Result<Dataset> {
    if spec.classes.is_empty() || spec.classes.len() > 2 {
        return Err(Error::invalid("synthetic spec needs one or two classes"));
    }
    let n = spec
        .n_features()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::invalid("first class needs a component with a non-empty mean"))?;

    let mut samples = Matrix::with_cols(n);
    let mut labels = Vec::new();
    let mut class_names = Vec::new();
    let mut z = vec![0.0; n];
    for (tag, class) in spec.classes.iter().enumerate() {
        if class.count == 0 {
            return Err(Error::invalid(format!("class '{}' has zero count", class.label)));
        }
        if class.components.is_empty() {
            return Err(Error::invalid(format!("class '{}' has no components", class.label)));
        }
        class_names.push(class.label.clone());
        let scaled: Vec<usize> = class
            .components
            .iter()
            .map(|c| {
                if c.weight.is_finite() && c.weight > 0.0 {
                    Ok((c.weight * 1e6).round() as usize)
                } else {
                    Err(Error::invalid("component weights must be positive"))
                }
            })
            .collect::<Result<_>>()?;
        let sizes = largest_remainder(&scaled, class.count);
        for (ci, (component, size)) in class.components.iter().zip(sizes).enumerate() {
            if component.mean.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: component.mean.len() });
            }
            let factor = cholesky(&component.covariance, n)?;
            let mut rng = seeded(derive_seed(spec.seed, ((tag as u64) << 32) | ci as u64));
            for _ in 0..size {
                for zj in z.iter_mut() {
                    *zj = StandardNormal.sample(&mut rng);
                }
                let row: Vec<f64> = (0..n)
                    .map(|i| component.mean[i] + (0..=i).map(|k| factor[i][k] * z[k]).sum::<f64>())
                    .collect();
                samples.push_row(&row)?;
                labels.push(tag as Tag);
            }
        }
    }
    Dataset::new(samples, labels, class_names, default_feature_names(n))
}

/// Lower-triangular factor `L` with `L Lᵀ = Σ`. Zero pivots (singular but
/// PSD directions) produce zero columns.
fn cholesky(cov: &Covariance, n: usize) -> Result<Vec<Vec<f64>>> {
    let mut l = vec![vec![0.0; n]; n];
    match cov {
        Covariance::Diagonal(var) => {
            if var.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: var.len() });
            }
            for (i, &v) in var.iter().enumerate() {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::invalid(format!("invalid covariance: variance {v}")));
                }
                l[i][i] = v.sqrt();
            }
        }
        Covariance::Full(a) => {
            if a.len() != n || a.iter().any(|r| r.len() != n) {
                return Err(Error::invalid("invalid covariance: shape does not match features"));
            }
            for (i, row) in a.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    if !v.is_finite() || (v - a[j][i]).abs() > 1e-12 {
                        return Err(Error::invalid("invalid covariance: not symmetric"));
                    }
                }
            }
            for j in 0..n {
                let pivot = a[j][j] - (0..j).map(|k| l[j][k] * l[j][k]).sum::<f64>();
                let tol = 1e-12 * a[j][j].abs().max(1.0);
                if pivot < -tol {
                    return Err(Error::invalid("invalid covariance: not positive semi-definite"));
                }
                if pivot <= tol {
                    continue;
                }
                l[j][j] = pivot.sqrt();
                for i in j + 1..n {
                    let s = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
                    l[i][j] = s / l[j][j];
                }
            }
        }
    }
    Ok(l)
}
