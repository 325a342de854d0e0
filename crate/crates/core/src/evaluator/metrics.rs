//! Threshold metrics and ROC analysis for binary scores.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// 0 when nothing was predicted positive.
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    /// True positive rate; 0 when there are no positives.
    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f_measure(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

/// Metrics for one evaluation run. `auc` and `roc_points` are absent when the
/// labels hold a single class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub accuracy: f64,
    pub auc: Option<f64>,
    pub confusion: Confusion,
    pub roc_points: Vec<RocPoint>,
}

impl MetricsReport {
    pub fn summary(&self) -> MetricSummary {
        MetricSummary {
            precision: self.precision,
            recall: self.recall,
            f_measure: self.f_measure,
            accuracy: self.accuracy,
            auc: self.auc,
        }
    }
}

/// The scalar part of a [`MetricsReport`]; what gets averaged across folds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub accuracy: f64,
    pub auc: Option<f64>,
}

impl MetricSummary {
    /// Arithmetic mean; AUC is averaged over the runs that have one.
    pub fn mean(items: &[MetricSummary]) -> Option<MetricSummary> {
        if items.is_empty() {
            return None;
        }
        let k = items.len() as f64;
        let avg = |f: fn(&MetricSummary) -> f64| items.iter().map(f).sum::<f64>() / k;
        let aucs: Vec<f64> = items.iter().filter_map(|m| m.auc).collect();
        Some(MetricSummary {
            precision: avg(|m| m.precision),
            recall: avg(|m| m.recall),
            f_measure: avg(|m| m.f_measure),
            accuracy: avg(|m| m.accuracy),
            auc: (!aucs.is_empty()).then(|| aucs.iter().sum::<f64>() / aucs.len() as f64),
        })
    }
}

/// Confusion counts at `threshold` (`p >= threshold` predicts positive) plus
/// the ROC curve when both classes are present.
pub fn classification_metrics(probs: &[f64], labels: &[bool], threshold: f64) -> Result<MetricsReport> {
    if probs.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: probs.len(),
        });
    }
    if probs.is_empty() {
        return Err(Error::Empty("no predictions to score".into()));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    let mut c = Confusion::default();
    for (&p, &y) in probs.iter().zip(labels) {
        match (p >= threshold, y) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    let (roc_points, auc) = match roc_auc(probs, labels) {
        Ok((points, auc)) => (points, Some(auc)),
        Err(Error::SingleClass) => (Vec::new(), None),
        Err(e) => return Err(e),
    };
    Ok(MetricsReport {
        threshold,
        precision: c.precision(),
        recall: c.recall(),
        f_measure: c.f_measure(),
        accuracy: c.accuracy(),
        auc,
        confusion: c,
        roc_points,
    })
}

/// ROC curve over descending distinct scores and its trapezoidal area.
/// Equal scores form a single step, so ties contribute a diagonal segment.
pub fn roc_auc(probs: &[f64], labels: &[bool]) -> Result<(Vec<RocPoint>, f64)> {
    if probs.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: probs.len(),
        });
    }
    if probs.iter().any(|p| p.is_nan()) {
        return Err(Error::invalid("scores contain NaN"));
    }
    let pos = labels.iter().filter(|&&y| y).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]));

    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0 }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut area = 0.0;
    let mut i = 0;
    while i < order.len() {
        let score = probs[order[i]];
        let (prev_tp, prev_fp) = (tp, fp);
        while i < order.len() && probs[order[i]] == score {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        // trapezoid in count space, normalized once at the end
        area += (fp - prev_fp) as f64 * (tp + prev_tp) as f64 / 2.0;
        points.push(RocPoint {
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
        });
    }
    Ok((points, area / (pos as f64 * neg as f64)))
}
