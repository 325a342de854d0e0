//! Binary-labelled datasets and the class accounting built on them.

mod csv_io;
mod split;
mod stats;
mod synthetic;

pub use csv_io::{load_csv, write_csv, write_csv_to, LabelColumn};
pub(crate) use split::largest_remainder;
pub use split::{split, split_indices, stratified_holdout, SplitIndices, SplitParts, SplitSpec};
pub use stats::{feature_stats, weighted_feature_stats, FeatureStats};
pub use synthetic::{make_synthetic_dataset, ClassSpec, Covariance, GaussianComponent, SyntheticSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Class tag: index into [`Dataset::class_names`]. Always 0 or 1.
pub type Tag = u8;

/// Feature matrix with binary class tags.
///
/// Tags are assigned to class names in first-seen order when loading; which
/// class is the minority is decided at runtime by [`class_counts`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    samples: Matrix,
    labels: Vec<Tag>,
    class_names: Vec<String>,
    feature_names: Vec<String>,
    label_name: String,
}

impl Dataset {
    pub fn new(
        samples: Matrix,
        labels: Vec<Tag>,
        class_names: Vec<String>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        if samples.rows() == 0 {
            return Err(Error::Empty("dataset has no samples".into()));
        }
        if labels.len() != samples.rows() {
            return Err(Error::DimensionMismatch {
                expected: samples.rows(),
                found: labels.len(),
            });
        }
        if feature_names.len() != samples.cols() {
            return Err(Error::DimensionMismatch {
                expected: samples.cols(),
                found: feature_names.len(),
            });
        }
        match class_names.len() {
            1 => {}
            2 if class_names[0] != class_names[1] => {}
            2 => return Err(Error::invalid("class names must be distinct")),
            0 => return Err(Error::invalid("at least one class name is required")),
            _ => return Err(Error::TooManyClasses(class_names)),
        }
        if let Some(&bad) = labels.iter().find(|&&t| t as usize >= class_names.len()) {
            return Err(Error::invalid(format!("label tag {bad} has no class name")));
        }
        for (i, row) in samples.iter_rows().enumerate() {
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
        Ok(Self {
            samples,
            labels,
            class_names,
            feature_names,
            label_name: "label".to_string(),
        })
    }

    /// Builds a dataset from string labels, assigning tags in first-seen order.
    pub fn from_named_labels<S: AsRef<str>>(samples: Matrix, labels: &[S]) -> Result<Self> {
        let mut class_names: Vec<String> = Vec::new();
        let mut tags = Vec::with_capacity(labels.len());
        for l in labels {
            let l = l.as_ref();
            let tag = match class_names.iter().position(|c| c == l) {
                Some(t) => t,
                None => {
                    class_names.push(l.to_string());
                    if class_names.len() > 2 {
                        return Err(Error::TooManyClasses(class_names));
                    }
                    class_names.len() - 1
                }
            };
            tags.push(tag as Tag);
        }
        if class_names.is_empty() {
            return Err(Error::Empty("dataset has no samples".into()));
        }
        let names = default_feature_names(samples.cols());
        Dataset::new(samples, tags, class_names, names)
    }

    pub fn with_label_name(mut self, name: impl Into<String>) -> Self {
        self.label_name = name.into();
        self
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                found: names.len(),
            });
        }
        self.feature_names = names;
        Ok(self)
    }

    pub fn n_samples(&self) -> usize {
        self.samples.rows()
    }

    pub fn n_features(&self) -> usize {
        self.samples.cols()
    }

    pub fn samples(&self) -> &Matrix {
        &self.samples
    }

    pub fn labels(&self) -> &[Tag] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn class_name(&self, tag: Tag) -> &str {
        &self.class_names[tag as usize]
    }

    pub fn tag_of(&self, name: &str) -> Option<Tag> {
        self.class_names.iter().position(|c| c == name).map(|t| t as Tag)
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn label_name(&self) -> &str {
        &self.label_name
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.samples.row(i)
    }

    pub fn class_indices(&self, tag: Tag) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &t)| t == tag)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn class_samples(&self, tag: Tag) -> Matrix {
        self.samples.select_rows(&self.class_indices(tag))
    }

    pub fn count_of(&self, tag: Tag) -> usize {
        self.labels.iter().filter(|&&t| t == tag).count()
    }

    /// Rows at `indices`, in that order. Class and feature names are kept.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        if indices.is_empty() {
            return Err(Error::Empty("subset selects no samples".into()));
        }
        Ok(Dataset {
            samples: self.samples.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
            feature_names: self.feature_names.clone(),
            label_name: self.label_name.clone(),
        })
    }

    /// Appends `rows`, all labelled `tag`.
    pub fn append_class_rows(&self, rows: &Matrix, tag: Tag) -> Result<Dataset> {
        if tag as usize >= self.class_names.len() {
            return Err(Error::invalid(format!("unknown class tag {tag}")));
        }
        for (i, row) in rows.iter_rows().enumerate() {
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row: self.n_samples() + i, col: j });
            }
        }
        let mut out = self.clone();
        out.samples.extend(rows)?;
        out.labels.extend(std::iter::repeat_n(tag, rows.rows()));
        Ok(out)
    }

    /// Concatenates two datasets that share class and feature names.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if other.n_features() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                found: other.n_features(),
            });
        }
        let mut out = self.clone();
        for (name, tag) in other.class_names.iter().zip(0..) {
            if other.labels.contains(&tag) && out.tag_of(name).is_none() {
                if out.class_names.len() == 2 {
                    let mut all = out.class_names.clone();
                    all.push(name.clone());
                    return Err(Error::TooManyClasses(all));
                }
                out.class_names.push(name.clone());
            }
        }
        out.samples.extend(&other.samples)?;
        for &t in &other.labels {
            let name = other.class_name(t);
            out.labels.push(out.tag_of(name).expect("class registered above"));
        }
        Ok(out)
    }

    /// Per-feature min-max scaling to [0, 1]; constant features map to 0.
    pub fn min_max_scaled(&self) -> Dataset {
        let n = self.n_features();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for row in self.samples.iter_rows() {
            for j in 0..n {
                lo[j] = lo[j].min(row[j]);
                hi[j] = hi[j].max(row[j]);
            }
        }
        let mut out = self.clone();
        for i in 0..out.n_samples() {
            let row = out.samples.row_mut(i);
            for j in 0..n {
                let span = hi[j] - lo[j];
                row[j] = if span > 0.0 { (row[j] - lo[j]) / span } else { 0.0 };
            }
        }
        out
    }
}

pub(crate) fn default_feature_names(n: usize) -> Vec<String> {
    (0..n).map(|j| format!("f{j}")).collect()
}

/// Minority/majority accounting for a two-class dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub minority: Tag,
    pub majority: Tag,
    pub m_min: usize,
    pub m_max: usize,
}

impl ClassCounts {
    pub fn ratio(&self) -> f64 {
        imbalance_ratio(self.m_min, self.m_max)
    }

    pub fn is_balanced(&self) -> bool {
        self.m_min == self.m_max
    }
}

/// Minority is the strictly smaller class; on equal counts the class whose
/// name sorts first is called the minority.
pub fn class_counts(d: &Dataset) -> Result<ClassCounts> {
    if d.class_names.len() < 2 {
        return Err(Error::SingleClass);
    }
    let c0 = d.count_of(0);
    let c1 = d.count_of(1);
    if c0 == 0 || c1 == 0 {
        return Err(Error::SingleClass);
    }
    let zero_is_minority = c0 < c1 || (c0 == c1 && d.class_names[0] < d.class_names[1]);
    Ok(if zero_is_minority {
        ClassCounts { minority: 0, majority: 1, m_min: c0, m_max: c1 }
    } else {
        ClassCounts { minority: 1, majority: 0, m_min: c1, m_max: c0 }
    })
}

pub fn imbalance_degree(d: &Dataset) -> Result<f64> {
    class_counts(d).map(|c| c.ratio())
}

/// `m_min / m_max`.
pub fn imbalance_ratio(m_min: usize, m_max: usize) -> f64 {
    m_min as f64 / m_max as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(labels: &[&str]) -> Dataset {
        let rows: Vec<Vec<f64>> = (0..labels.len()).map(|i| vec![i as f64]).collect();
        Dataset::from_named_labels(Matrix::from_rows(&rows).unwrap(), labels).unwrap()
    }

    #[test]
    fn counts_ten_and_thirty() {
        let mut labels = vec!["maj"; 30];
        labels.extend(vec!["min"; 10]);
        let d = dataset(&labels);
        let c = class_counts(&d).unwrap();
        assert_eq!((c.m_min, c.m_max), (10, 30));
        assert_eq!(d.class_name(c.minority), "min");
    }

    #[test]
    fn tie_breaks_to_lexicographically_smaller_label() {
        let mut labels = vec!["zeta"; 20];
        labels.extend(vec!["alpha"; 20]);
        let d = dataset(&labels);
        let c = class_counts(&d).unwrap();
        assert_eq!((c.m_min, c.m_max), (20, 20));
        assert_eq!(d.class_name(c.minority), "alpha");
        assert_eq!(imbalance_degree(&d).unwrap(), 1.0);
    }

    #[test]
    fn single_class_rejected() {
        let d = dataset(&["a", "a", "a"]);
        assert!(matches!(class_counts(&d), Err(Error::SingleClass)));
        assert!(matches!(imbalance_degree(&d), Err(Error::SingleClass)));
    }

    #[test]
    fn degree_arithmetic() {
        assert_eq!(imbalance_ratio(1, 1000), 0.001);
        assert!((imbalance_ratio(2712, 7288) - 0.3721).abs() < 1e-4);
    }

    #[test]
    fn non_finite_rejected() {
        let m = Matrix::new(2, 1, vec![1.0, f64::NAN]).unwrap();
        let err = Dataset::from_named_labels(m, &["a", "b"]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 1, col: 0 }));
    }

    #[test]
    fn three_labels_rejected() {
        let m = Matrix::new(3, 1, vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            Dataset::from_named_labels(m, &["a", "b", "c"]),
            Err(Error::TooManyClasses(_))
        ));
    }

    #[test]
    fn concat_maps_labels_by_name() {
        let a = dataset(&["x", "y"]);
        let b = dataset(&["y", "y", "x"]);
        let c = a.concat(&b).unwrap();
        let names: Vec<&str> = c.labels().iter().map(|&t| c.class_name(t)).collect();
        assert_eq!(names, vec!["x", "y", "y", "y", "x"]);
    }

    #[test]
    fn min_max_scaling_handles_constant_columns() {
        let m = Matrix::from_rows(&[vec![1.0, 5.0], vec![3.0, 5.0]]).unwrap();
        let d = Dataset::from_named_labels(m, &["a", "b"]).unwrap().min_max_scaled();
        assert_eq!(d.samples().as_slice(), &[0.0, 0.0, 1.0, 0.0]);
    }
}
