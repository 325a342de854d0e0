//! CSV and JSON writers for reports, sweeps, batches and evaluation output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::evaluator::{CorrelationMatrix, MetricsReport, TrainingTrace};
use crate::oversample::{Algorithm, SyntheticBatch};
use crate::silhouette::{BinSummary, ClassSilhouette, SilhouetteReport};
use crate::undersample::{Idft, RemovalOrder, SweepRecord, SweepResult};

const BIN_NAMES: [&str; 3] = ["near_minus_one", "near_zero", "near_plus_one"];

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create(path)?))
}

fn finish(mut w: csv::Writer<BufWriter<File>>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

/// One row per sample: index, class label, coefficient, bin name.
pub fn write_silhouette_csv(report: &SilhouetteReport, class_names: &[String], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["index", "label", "coefficient", "bin"])?;
    for (t, (&s, &tag)) in report.coefficients.iter().zip(&report.labels).enumerate() {
        w.write_record([
            t.to_string(),
            class_names[tag as usize].clone(),
            s.to_string(),
            BIN_NAMES[report.bin_of(t)].to_string(),
        ])?;
    }
    finish(w, path)
}

#[derive(Serialize)]
struct SilhouetteSummary<'a> {
    samples: usize,
    thresholds: (f64, f64),
    bin_names: [&'static str; 3],
    bins: &'a BinSummary,
    percentages: [f64; 3],
    per_class_mean: &'a [ClassSilhouette],
}

pub fn write_silhouette_json(report: &SilhouetteReport, path: &Path) -> Result<()> {
    write_json(
        &SilhouetteSummary {
            samples: report.len(),
            thresholds: report.bins.thresholds,
            bin_names: BIN_NAMES,
            bins: &report.bins,
            percentages: report.bins.percentages(),
            per_class_mean: &report.per_class_mean,
        },
        path,
    )
}

/// Table of the sweep, baseline first. The `idft` column marks the
/// fall-down iteration.
pub fn write_sweep_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header: Vec<String> = ["iteration", "fraction", "removed"].map(String::from).to_vec();
    header.extend(result.class_names.iter().map(|c| format!("pct_{c}")));
    header.extend(
        ["imbalance_degree", "precision", "recall", "f_measure", "accuracy", "auc", "acceptable", "idft"]
            .map(String::from),
    );
    w.write_record(&header)?;
    let idft_iter = result.idft.map(|i| i.iteration);
    for rec in std::iter::once(&result.baseline).chain(&result.records) {
        let mut row = vec![rec.iteration.to_string(), rec.fraction.to_string(), rec.removed.to_string()];
        row.extend(rec.class_percentages[..result.class_names.len()].iter().map(|p| format!("{p:.2}")));
        row.extend([
            rec.imbalance_degree.to_string(),
            rec.metrics.precision.to_string(),
            rec.metrics.recall.to_string(),
            rec.metrics.f_measure.to_string(),
            rec.metrics.accuracy.to_string(),
            opt(rec.metrics.auc),
            rec.acceptable.to_string(),
            if Some(rec.iteration) == idft_iter { "IDft".into() } else { String::new() },
        ]);
        w.write_record(&row)?;
    }
    finish(w, path)
}

#[derive(Serialize)]
struct SweepJson<'a> {
    class_names: &'a [String],
    target: &'a str,
    order: RemovalOrder,
    baseline: &'a SweepRecord,
    records: &'a [SweepRecord],
    idft: Option<Idft>,
}

pub fn write_sweep_json(result: &SweepResult, path: &Path) -> Result<()> {
    write_json(
        &SweepJson {
            class_names: &result.class_names,
            target: &result.class_names[result.target as usize],
            order: result.order,
            baseline: &result.baseline,
            records: &result.records,
            idft: result.idft,
        },
        path,
    )
}

pub fn write_trace_csv(trace: &TrainingTrace, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["epoch", "tlc", "vlc"])?;
    for (e, (t, v)) in trace.train_loss.iter().zip(&trace.validation_loss).enumerate() {
        w.write_record([(e + 1).to_string(), t.to_string(), v.to_string()])?;
    }
    finish(w, path)
}

/// One row per named evaluation set.
pub fn write_metrics_csv(reports: &[(&str, &MetricsReport)], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["set", "precision", "recall", "f_measure", "accuracy", "auc", "tp", "fp", "tn", "fn"])?;
    for (name, r) in reports {
        let c = r.confusion;
        w.write_record([
            name.to_string(),
            r.precision.to_string(),
            r.recall.to_string(),
            r.f_measure.to_string(),
            r.accuracy.to_string(),
            opt(r.auc),
            c.tp.to_string(),
            c.fp.to_string(),
            c.tn.to_string(),
            c.fn_.to_string(),
        ])?;
    }
    finish(w, path)
}

/// Square matrix with a leading `feature` column.
pub fn write_correlation_csv(c: &CorrelationMatrix, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["feature".to_string()];
    header.extend(c.names.iter().cloned());
    w.write_record(&header)?;
    for i in 0..c.n() {
        let mut row = vec![c.names[i].clone()];
        row.extend((0..c.n()).map(|j| c.get(i, j).to_string()));
        w.write_record(&row)?;
    }
    finish(w, path)
}

/// Long format for scatter-matrix plots: one row per sample and feature pair
/// `x < y`.
pub fn write_pairs_csv(d: &Dataset, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["feature_x", "feature_y", "value_x", "value_y", "class"])?;
    let names = d.feature_names();
    for x in 0..d.n_features() {
        for y in x + 1..d.n_features() {
            for (i, row) in d.samples().iter_rows().enumerate() {
                w.write_record([
                    names[x].as_str(),
                    names[y].as_str(),
                    &row[x].to_string(),
                    &row[y].to_string(),
                    d.class_name(d.labels()[i]),
                ])?;
            }
        }
    }
    finish(w, path)
}

/// Generated rows with `algorithm` and `seed` columns appended.
pub fn write_batch_csv(batch: &SyntheticBatch, feature_names: &[String], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header: Vec<String> = feature_names.to_vec();
    header.extend(["algorithm".to_string(), "seed".to_string()]);
    w.write_record(&header)?;
    for row in batch.samples.iter_rows() {
        let mut rec: Vec<String> = row.iter().map(f64::to_string).collect();
        rec.push(batch.algorithm.to_string());
        rec.push(batch.seed.to_string());
        w.write_record(&rec)?;
    }
    finish(w, path)
}

/// Counters of a generator run, without the rows themselves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchProvenance {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub requested: usize,
    pub accepted: usize,
    pub rejected_by_1nn: usize,
    pub rejected_duplicate: usize,
    pub attempts: usize,
    pub complete: bool,
    pub filter_reference_size: Option<usize>,
}

impl BatchProvenance {
    pub fn new(batch: &SyntheticBatch, requested: usize) -> Self {
        Self {
            algorithm: batch.algorithm,
            seed: batch.seed,
            requested,
            accepted: batch.accepted,
            rejected_by_1nn: batch.rejected_by_1nn,
            rejected_duplicate: batch.rejected_duplicate,
            attempts: batch.attempts,
            complete: batch.accepted == requested,
            filter_reference_size: batch.filter_reference.as_ref().map(Vec::len),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_synthetic_dataset, SyntheticSpec};
    use crate::evaluator::{classification_metrics, pearson_matrix};
    use crate::silhouette::{silhouette_report, DEFAULT_BINS};

    fn read(path: &Path) -> String {
        std::fs::read_to_string(path).unwrap()
    }

    #[test]
    fn silhouette_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let d = make_synthetic_dataset(&SyntheticSpec::separable(2, 5, 5, 8.0, 0)).unwrap();
        let rep = silhouette_report(&d, DEFAULT_BINS).unwrap();
        let csv = dir.path().join("s.csv");
        write_silhouette_csv(&rep, d.class_names(), &csv).unwrap();
        let text = read(&csv);
        assert_eq!(text.lines().count(), 11);
        assert!(text.starts_with("index,label,coefficient,bin\n0,majority,"));
        let json = dir.path().join("s.json");
        write_silhouette_json(&rep, &json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&read(&json)).unwrap();
        assert_eq!(v["samples"], 10);
        assert_eq!(v["bins"]["counts"][2], 10);
    }

    #[test]
    fn pairs_and_correlation_shapes() {
        let dir = tempfile::tempdir().unwrap();
        let d = make_synthetic_dataset(&SyntheticSpec::separable(3, 4, 6, 2.0, 0)).unwrap();
        let pairs = dir.path().join("p.csv");
        write_pairs_csv(&d, &pairs).unwrap();
        assert_eq!(read(&pairs).lines().count(), 1 + 3 * 10);
        let corr = dir.path().join("c.csv");
        write_correlation_csv(&pearson_matrix(&d).unwrap(), &corr).unwrap();
        let text = read(&corr);
        assert_eq!(text.lines().next().unwrap(), "feature,f0,f1,f2");
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn metrics_rows_keep_confusion() {
        let dir = tempfile::tempdir().unwrap();
        let r = classification_metrics(&[0.9, 0.2, 0.7], &[true, false, false], 0.5).unwrap();
        let path = dir.path().join("m.csv");
        write_metrics_csv(&[("test", &r)], &path).unwrap();
        let text = read(&path);
        assert!(text.lines().nth(1).unwrap().ends_with(",1,1,1,0"), "{text}");
    }
}
