//! Classifier, metrics and correlation analysis used to judge resampled data.

mod correlation;
mod cv;
mod metrics;
mod mlp;

pub use correlation::{pearson_matrix, pearson_of, CorrelationMatrix};
pub use cv::{kfold_cv, stratified_folds, CvReport, DEFAULT_FOLDS};
pub use metrics::{classification_metrics, roc_auc, Confusion, MetricSummary, MetricsReport, RocPoint};
pub use mlp::{mlp_train, score_dataset, sigmoid, targets, Activation, Layer, MlpConfig, MlpModel, TrainingTrace, HIDDEN_UNITS};

use crate::data::{Dataset, Tag};
use crate::error::Result;

/// Default decision threshold.
pub const THRESHOLD: f64 = 0.5;

/// Metrics of `model` on `d`, with `positive` as the positive class.
pub fn evaluate_model(model: &MlpModel, d: &Dataset, positive: Tag) -> Result<MetricsReport> {
    let (probs, truth) = score_dataset(model, d, positive)?;
    classification_metrics(&probs, &truth, THRESHOLD)
}
