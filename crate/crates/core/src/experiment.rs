//! Experiment configuration and the command runners behind the `resample`
//! binary. Every runner is deterministic in (input, config, seed) and writes
//! its artifacts as `<command>-<algorithm>-<seed>[-<part>].<ext>`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{
    class_counts, imbalance_degree, load_csv, make_synthetic_dataset, split, stratified_holdout, write_csv, ClassSpec,
    Dataset, LabelColumn, SplitSpec, SyntheticSpec, Tag,
};
use crate::error::{Error, Result};
use crate::evaluator::{
    evaluate_model, mlp_train, pearson_matrix, Activation, MetricsReport, MlpConfig, TrainingTrace, DEFAULT_FOLDS,
};
use crate::export;
use crate::oversample::{rebalance, Algorithm, OversampleConfig, SyntheticBatch};
use crate::rng::{derive_seed, seeded};
use crate::silhouette::{silhouette_report, SilhouetteReport, DEFAULT_BINS};
use crate::undersample::{
    idft_sweep, idft_sweep_cv, relative_f_measure, remove_fraction, RemovalOrder, RemovalPlan, SweepConfig, SweepResult,
};

/// Where the data comes from when no input file is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SyntheticSource {
    // struct form so that unknown keys are rejected
    Benchmark {},
    Separable {
        n_features: usize,
        minority: usize,
        majority: usize,
        separation: f64,
    },
    Custom {
        classes: Vec<ClassSpec>,
    },
}

impl SyntheticSource {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Benchmark {} => "benchmark",
            Self::Separable { .. } => "separable",
            Self::Custom { .. } => "custom",
        }
    }

    pub fn spec(&self, seed: u64) -> SyntheticSpec {
        match self {
            Self::Benchmark {} => SyntheticSpec::benchmark(seed),
            Self::Separable { n_features, minority, majority, separation } => {
                SyntheticSpec::separable(*n_features, *minority, *majority, *separation, seed)
            }
            Self::Custom { classes } => SyntheticSpec { classes: classes.clone(), seed },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitFractions {
    pub train_fraction: f64,
    pub test_fraction: f64,
    pub validation_fraction: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        let d = SplitSpec::default();
        Self {
            train_fraction: d.train_fraction,
            test_fraction: d.test_fraction,
            validation_fraction: d.validation_fraction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSettings {
    pub fractions: Vec<f64>,
    pub order: RemovalOrder,
    /// Class to deplete; the training minority when absent.
    pub target: Option<String>,
    /// Cross-validation folds; below 2 the sweep uses the test split as holdout.
    pub folds: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            fractions: SweepConfig::default_fractions(),
            order: RemovalOrder::Descending,
            target: None,
            folds: DEFAULT_FOLDS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MlpSettings {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub hidden: Activation,
}

impl Default for MlpSettings {
    fn default() -> Self {
        let d = MlpConfig::default();
        Self {
            epochs: d.epochs,
            batch_size: d.batch_size,
            learning_rate: d.learning_rate,
            hidden: d.hidden,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub input: Option<PathBuf>,
    /// Label column name or zero-based index; the last column by default.
    pub label_column: Option<String>,
    /// Separate held-out file for `evaluate`.
    pub test_input: Option<PathBuf>,
    pub synthetic: Option<SyntheticSource>,
    pub seed: u64,
    /// Min-max scale features before anything else.
    pub scale: bool,
    /// Treat the whole input as training data.
    pub no_split: bool,
    pub split: SplitFractions,
    pub algorithm: Option<Algorithm>,
    pub k: usize,
    pub bins: (f64, f64),
    pub max_attempts_factor: usize,
    pub filter_fraction: f64,
    /// Positive class for metrics; the training minority when absent.
    pub positive_label: Option<String>,
    pub sweep: SweepSettings,
    pub mlp: MlpSettings,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let o = OversampleConfig::default();
        Self {
            input: None,
            label_column: None,
            test_input: None,
            synthetic: None,
            seed: 0,
            scale: false,
            no_split: false,
            split: SplitFractions::default(),
            algorithm: None,
            k: o.k,
            bins: DEFAULT_BINS,
            max_attempts_factor: o.max_attempts_factor,
            filter_fraction: o.filter_fraction,
            positive_label: None,
            sweep: SweepSettings::default(),
            mlp: MlpSettings::default(),
            out: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        // relative paths in a config file are relative to the file
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.input, &mut cfg.test_input].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            train_fraction: self.split.train_fraction,
            test_fraction: self.split.test_fraction,
            validation_fraction: self.split.validation_fraction,
            seed: self.seed,
        }
    }

    pub fn oversample_config(&self) -> OversampleConfig {
        OversampleConfig {
            k: self.k,
            max_attempts_factor: self.max_attempts_factor,
            filter_fraction: self.filter_fraction,
            bins: self.bins,
        }
    }

    pub fn mlp_config(&self) -> MlpConfig {
        MlpConfig {
            epochs: self.mlp.epochs,
            batch_size: self.mlp.batch_size,
            learning_rate: self.mlp.learning_rate,
            hidden: self.mlp.hidden,
            seed: self.seed,
        }
    }

    /// Algorithm for commands that must oversample.
    pub fn oversampler(&self) -> Algorithm {
        self.algorithm.unwrap_or(Algorithm::G1no)
    }

    fn label_column(&self) -> Result<LabelColumn> {
        match &self.label_column {
            None => Ok(LabelColumn::Last),
            Some(s) => Ok(s.parse().unwrap_or_default()),
        }
    }

    pub fn load_dataset(&self) -> Result<Dataset> {
        let d = match (&self.input, &self.synthetic) {
            (Some(path), _) => load_csv(path, &self.label_column()?)?,
            (None, Some(src)) => make_synthetic_dataset(&src.spec(self.seed))?,
            (None, None) => {
                return Err(Error::Config("no input: pass --input or add a [synthetic] section".into()))
            }
        };
        Ok(if self.scale { d.min_max_scaled() } else { d })
    }

    /// Tag of `name` in `d`, or the minority of `d` when `name` is absent.
    fn class_tag(d: &Dataset, name: Option<&str>) -> Result<Tag> {
        match name {
            Some(n) => d
                .tag_of(n)
                .ok_or_else(|| Error::Config(format!("class '{n}' does not occur in the data"))),
            None => Ok(class_counts(d)?.minority),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn stem(command: &str, tag: &str, seed: u64) -> String {
    format!("{command}-{tag}-{seed}")
}

/// Relabels `other` with the tags of `reference`, matching class names.
fn align_labels(other: &Dataset, reference: &Dataset) -> Result<Dataset> {
    let labels = other
        .labels()
        .iter()
        .map(|&t| {
            let name = other.class_name(t);
            reference
                .tag_of(name)
                .ok_or_else(|| Error::invalid(format!("class '{name}' is not present in the training data")))
        })
        .collect::<Result<Vec<Tag>>>()?;
    Dataset::new(
        other.samples().clone(),
        labels,
        reference.class_names().to_vec(),
        reference.feature_names().to_vec(),
    )
}

// ---------------------------------------------------------------- silhouette

fn silhouette_stage(cfg: &ExperimentConfig, d: &Dataset, dir: &Path) -> Result<(SilhouetteReport, Vec<PathBuf>)> {
    let report = silhouette_report(d, cfg.bins)?;
    let base = format!("silhouette-{}", cfg.seed);
    let csv = dir.join(format!("{base}.csv"));
    let json = dir.join(format!("{base}.json"));
    export::write_silhouette_csv(&report, d.class_names(), &csv)?;
    export::write_silhouette_json(&report, &json)?;
    Ok((report, vec![csv, json]))
}

pub fn run_silhouette(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let d = cfg.load_dataset()?;
    ensure_dir(&cfg.out)?;
    let (report, files) = silhouette_stage(cfg, &d, &cfg.out)?;
    let p = report.bins.percentages();
    Ok(CommandOutput {
        files,
        summary: format!(
            "{} samples; near -1: {:.2}%, near 0: {:.2}%, near +1: {:.2}%",
            report.len(),
            p[0],
            p[1],
            p[2]
        ),
    })
}

// --------------------------------------------------------------------- sweep

/// Builds the train/evaluate callback used by sweeps: trains on the first
/// set and reports metrics on the second with `positive` as positive class.
pub fn mlp_evaluator(config: MlpConfig, positive: Tag) -> impl Fn(&Dataset, &Dataset) -> Result<MetricsReport> + Sync {
    move |train: &Dataset, eval: &Dataset| {
        let (model, _) = mlp_train(train, eval, &config)?;
        evaluate_model(&model, eval, positive)
    }
}

fn sweep_config(cfg: &ExperimentConfig, target: Tag) -> SweepConfig {
    SweepConfig {
        fractions: cfg.sweep.fractions.clone(),
        target: Some(target),
        order: cfg.sweep.order,
        seed: cfg.seed,
    }
}

/// Runs the sweep on `train` (cross-validated when folds ≥ 2, otherwise
/// against `holdout`) and writes the table.
fn sweep_stage(
    cfg: &ExperimentConfig,
    train: &Dataset,
    holdout: &Dataset,
    report: &SilhouetteReport,
    dir: &Path,
) -> Result<(SweepResult, Vec<PathBuf>)> {
    let target = ExperimentConfig::class_tag(train, cfg.sweep.target.as_deref())?;
    let sc = sweep_config(cfg, target);
    let evaluator = mlp_evaluator(cfg.mlp_config(), target);
    let result = if cfg.sweep.folds >= 2 {
        idft_sweep_cv(train, cfg.sweep.folds, cfg.bins, &sc, evaluator, relative_f_measure)?
    } else {
        idft_sweep(train, holdout, report, &sc, evaluator, relative_f_measure)?
    };
    let base = stem("imbalance-sweep", &cfg.sweep.order.to_string(), cfg.seed);
    let csv = dir.join(format!("{base}.csv"));
    let json = dir.join(format!("{base}.json"));
    export::write_sweep_csv(&result, &csv)?;
    export::write_sweep_json(&result, &json)?;
    Ok((result, vec![csv, json]))
}

fn sweep_summary(r: &SweepResult) -> String {
    match r.idft {
        Some(i) => format!(
            "{} iterations; IDft {:.4} at iteration {} ({}% removed)",
            r.records.len(),
            i.imbalance_degree,
            i.iteration,
            (i.fraction * 100.0).round()
        ),
        None => format!("{} iterations; no fall-down detected", r.records.len()),
    }
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let d = cfg.load_dataset()?;
    ensure_dir(&cfg.out)?;
    let (result, files) = if cfg.sweep.folds >= 2 {
        // folds provide the holdouts; silhouettes are computed per fold
        let report = silhouette_report(&d, cfg.bins)?;
        sweep_stage(cfg, &d, &d, &report, &cfg.out)?
    } else {
        let parts = split(&d, &cfg.split_spec())?;
        let train = parts.train();
        let report = silhouette_report(&train, cfg.bins)?;
        sweep_stage(cfg, &train, &parts.test, &report, &cfg.out)?
    };
    Ok(CommandOutput { files, summary: sweep_summary(&result) })
}

// ----------------------------------------------------------------- rebalance

fn rebalance_stage(cfg: &ExperimentConfig, train: &Dataset, dir: &Path) -> Result<(Dataset, SyntheticBatch, Vec<PathBuf>)> {
    let alg = cfg.oversampler();
    let base = stem("rebalance", alg.name(), cfg.seed);
    let requested = class_counts(train).map(|c| c.m_max - c.m_min)?;
    let sidecar = dir.join(format!("{base}-batch.json"));
    match rebalance(train, alg, &cfg.oversample_config(), cfg.seed) {
        Ok((balanced, batch)) => {
            let out = dir.join(format!("{base}.csv"));
            let batch_csv = dir.join(format!("{base}-batch.csv"));
            write_csv(&balanced, &out)?;
            export::write_batch_csv(&batch, balanced.feature_names(), &batch_csv)?;
            export::write_json(&export::BatchProvenance::new(&batch, requested), &sidecar)?;
            Ok((balanced, batch, vec![out, batch_csv, sidecar]))
        }
        Err(Error::BudgetExhausted { requested, batch }) => {
            // rows are withheld; only the counters are written
            export::write_json(&export::BatchProvenance::new(&batch, requested), &sidecar)?;
            Err(Error::BudgetExhausted { requested, batch })
        }
        Err(e) => Err(e),
    }
}

pub fn run_rebalance(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let d = cfg.load_dataset()?;
    ensure_dir(&cfg.out)?;
    let mut files = Vec::new();
    let train = if cfg.no_split {
        d
    } else {
        let parts = split(&d, &cfg.split_spec())?;
        let test = cfg.out.join(format!("{}-test.csv", stem("rebalance", cfg.oversampler().name(), cfg.seed)));
        write_csv(&parts.test, &test)?;
        files.push(test);
        parts.train()
    };
    let before = imbalance_degree(&train)?;
    let (balanced, batch, written) = rebalance_stage(cfg, &train, &cfg.out)?;
    files.splice(0..0, written);
    Ok(CommandOutput {
        files,
        summary: format!(
            "{}: ID {before:.4} -> {:.4}; {} synthetic rows in {} attempts",
            batch.algorithm,
            imbalance_degree(&balanced)?,
            batch.accepted,
            batch.attempts
        ),
    })
}

// ------------------------------------------------------------------ evaluate

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationSummary {
    pub positive: String,
    pub learn_samples: usize,
    pub validation_samples: usize,
    pub test_samples: usize,
    pub test: MetricsReport,
    pub validation: MetricsReport,
    pub trace: TrainingTrace,
    pub mean_abs_correlation: f64,
}

/// Trains on a stratified learn/validation split of `train` and scores the
/// validation part and `test`.
fn evaluate_stage(
    cfg: &ExperimentConfig,
    train: &Dataset,
    test: &Dataset,
    positive: Tag,
    label: &str,
    dir: &Path,
) -> Result<(EvaluationSummary, Vec<PathBuf>)> {
    let all: Vec<usize> = (0..train.n_samples()).collect();
    let mut rng = seeded(derive_seed(cfg.seed, 0xE7A1));
    let (learn_idx, val_idx) = stratified_holdout(train.labels(), &all, cfg.split.validation_fraction, &mut rng);
    if val_idx.is_empty() {
        return Err(Error::EmptySplitPart("validation"));
    }
    let learn = train.subset(&learn_idx)?;
    let validation = train.subset(&val_idx)?;
    let (model, trace) = mlp_train(&learn, &validation, &cfg.mlp_config())?;
    let test_report = evaluate_model(&model, test, positive)?;
    let val_report = evaluate_model(&model, &validation, positive)?;
    let corr = pearson_matrix(train)?;

    let base = stem("evaluate", label, cfg.seed);
    let path = |part: &str, ext: &str| dir.join(format!("{base}-{part}.{ext}"));
    let files = vec![
        path("metrics", "json"),
        path("metrics", "csv"),
        path("trace", "csv"),
        path("pearson", "csv"),
        path("pairs", "csv"),
    ];
    let summary = EvaluationSummary {
        positive: train.class_name(positive).to_string(),
        learn_samples: learn.n_samples(),
        validation_samples: validation.n_samples(),
        test_samples: test.n_samples(),
        test: test_report,
        validation: val_report,
        trace,
        mean_abs_correlation: corr.mean_abs_off_diagonal(),
    };
    export::write_json(&summary, &files[0])?;
    export::write_metrics_csv(&[("test", &summary.test), ("validation", &summary.validation)], &files[1])?;
    export::write_trace_csv(&summary.trace, &files[2])?;
    export::write_correlation_csv(&corr, &files[3])?;
    export::write_pairs_csv(train, &files[4])?;
    Ok((summary, files))
}

fn evaluation_text(s: &EvaluationSummary) -> String {
    format!(
        "test: accuracy {:.4}, precision {:.4}, recall {:.4}, F {:.4}, AUC {}; validation accuracy {:.4}",
        s.test.accuracy,
        s.test.precision,
        s.test.recall,
        s.test.f_measure,
        s.test.auc.map_or("n/a".to_string(), |a| format!("{a:.4}")),
        s.validation.accuracy
    )
}

pub fn run_evaluate(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let d = cfg.load_dataset()?;
    ensure_dir(&cfg.out)?;
    let (train, test) = match &cfg.test_input {
        Some(path) => {
            let t = load_csv(path, &cfg.label_column()?)?;
            let t = if cfg.scale { t.min_max_scaled() } else { t };
            let t = align_labels(&t, &d)?;
            (d, t)
        }
        None => {
            let parts = split(&d, &cfg.split_spec())?;
            (parts.train(), parts.test)
        }
    };
    let positive = ExperimentConfig::class_tag(&train, cfg.positive_label.as_deref())?;
    let (summary, files) = evaluate_stage(cfg, &train, &test, positive, cfg.algorithm.map_or("none", Algorithm::name), &cfg.out)?;
    Ok(CommandOutput { files, summary: evaluation_text(&summary) })
}

// --------------------------------------------------------------------- synth

pub fn run_synth(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let src = cfg.synthetic.clone().unwrap_or(SyntheticSource::Benchmark {});
    let d = make_synthetic_dataset(&src.spec(cfg.seed))?;
    ensure_dir(&cfg.out)?;
    let path = cfg.out.join(format!("{}.csv", stem("synth", src.name(), cfg.seed)));
    write_csv(&d, &path)?;
    Ok(CommandOutput {
        files: vec![path],
        summary: format!("{} samples, {} features", d.n_samples(), d.n_features()),
    })
}

// ------------------------------------------------------------------ pipeline

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Complete,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileRecord {
    /// Relative to the run directory.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    pub name: &'static str,
    pub status: StageStatus,
    pub error: Option<String>,
    pub files: Vec<FileRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Seeds {
    pub seed: u64,
    pub split: u64,
    pub sweep: u64,
    pub oversample: u64,
    pub mlp: u64,
}

/// Written as `manifest.json`; contains no timestamps so that repeated runs
/// produce identical manifests.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: ExperimentConfig,
    pub seeds: Seeds,
    pub stages: Vec<StageRecord>,
    pub stage_reached: &'static str,
    pub completed: bool,
}

#[derive(Debug)]
pub struct PipelineOutcome {
    pub dir: PathBuf,
    pub manifest: Manifest,
    /// The error that stopped the run, if any.
    pub error: Option<Error>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

fn file_records(dir: &Path, files: &[PathBuf]) -> Result<Vec<FileRecord>> {
    files
        .iter()
        .map(|f| {
            Ok(FileRecord {
                path: f.strip_prefix(dir).unwrap_or(f).display().to_string(),
                sha256: sha256_file(f)?,
            })
        })
        .collect()
}

/// Fresh `<out>/pipeline-<alg>-<seed>-<unixtime>` directory.
fn run_directory(cfg: &ExperimentConfig) -> Result<PathBuf> {
    ensure_dir(&cfg.out)?;
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let base = format!("{}-{now}", stem("pipeline", cfg.oversampler().name(), cfg.seed));
    for attempt in 0.. {
        let name = if attempt == 0 { base.clone() } else { format!("{base}-{attempt}") };
        let dir = cfg.out.join(name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(Error::io(&dir, e)),
        }
    }
    unreachable!()
}

struct Imbalanced {
    train: Dataset,
    test: Dataset,
    target: Tag,
}

fn pipeline_imbalance(cfg: &ExperimentConfig, dir: &Path) -> Result<(Imbalanced, Vec<PathBuf>)> {
    let d = cfg.load_dataset()?;
    let parts = split(&d, &cfg.split_spec())?;
    let train = parts.train();
    let (report, mut files) = silhouette_stage(cfg, &train, dir)?;
    let (result, sweep_files) = sweep_stage(cfg, &train, &parts.test, &report, dir)?;
    files.extend(sweep_files);
    let fraction = match result.idft {
        Some(i) => i.fraction,
        None => *cfg.sweep.fractions.last().expect("validated by the sweep"),
    };
    let plan = RemovalPlan { target: result.target, fraction, order: cfg.sweep.order, seed: cfg.seed };
    let reduced = remove_fraction(&train, &plan, &report)?.reduced;
    let path = dir.join(format!("{}-imbalanced.csv", stem("imbalance-sweep", &cfg.sweep.order.to_string(), cfg.seed)));
    write_csv(&reduced, &path)?;
    files.push(path);
    Ok((Imbalanced { train: reduced, test: parts.test, target: result.target }, files))
}

/// Collects stage records; files are listed relative to the run directory.
struct StageLog<'a> {
    dir: &'a Path,
    stages: Vec<StageRecord>,
    error: Option<Error>,
}

impl StageLog<'_> {
    fn run<T>(&mut self, name: &'static str, stage: impl FnOnce() -> Result<(T, Vec<PathBuf>)>) -> Option<T> {
        if self.error.is_some() {
            self.stages.push(StageRecord { name, status: StageStatus::Skipped, error: None, files: Vec::new() });
            return None;
        }
        let before = self.listing();
        match stage().and_then(|(value, files)| Ok((value, file_records(self.dir, &files)?))) {
            Ok((value, files)) => {
                self.stages.push(StageRecord { name, status: StageStatus::Complete, error: None, files });
                Some(value)
            }
            Err(e) => {
                // whatever the failed stage managed to write (budget counters)
                let written: Vec<PathBuf> = self.listing().into_iter().filter(|p| !before.contains(p)).collect();
                self.stages.push(StageRecord {
                    name,
                    status: StageStatus::Failed,
                    error: Some(e.to_string()),
                    files: file_records(self.dir, &written).unwrap_or_default(),
                });
                self.error = Some(e);
                None
            }
        }
    }

    fn listing(&self) -> Vec<PathBuf> {
        let mut paths: Vec<PathBuf> = fs::read_dir(self.dir)
            .map(|rd| rd.filter_map(|e| e.ok().map(|e| e.path())).collect())
            .unwrap_or_default();
        paths.sort();
        paths
    }
}

/// Imbalance → rebalance → evaluate on one split of the input. The sweep
/// picks the removal fraction (its IDft, or the last fraction when the
/// classifier never falls down); the training split is depleted at that
/// fraction, oversampled back to balance, and the classifier trained on it
/// is scored on the untouched test split.
pub fn run_pipeline(cfg: &ExperimentConfig) -> Result<PipelineOutcome> {
    let dir = run_directory(cfg)?;
    let mut log = StageLog { dir: &dir, stages: Vec::new(), error: None };

    let imbalanced = log.run("imbalance", || pipeline_imbalance(cfg, &dir));
    let balanced = log.run("rebalance", || {
        let im = imbalanced.as_ref().expect("runs only after imbalance");
        rebalance_stage(cfg, &im.train, &dir).map(|(b, _, files)| (b, files))
    });
    log.run("evaluate", || {
        let im = imbalanced.as_ref().expect("runs only after imbalance");
        let train = balanced.as_ref().expect("runs only after rebalance");
        evaluate_stage(cfg, train, &im.test, im.target, cfg.oversampler().name(), &dir)
    });

    let StageLog { stages, error, .. } = log;
    let stage_reached = stages
        .iter()
        .rev()
        .find(|s| s.status != StageStatus::Skipped)
        .map_or("imbalance", |s| s.name);
    let manifest = Manifest {
        tool: "resample",
        version: env!("CARGO_PKG_VERSION"),
        command: "pipeline",
        config: cfg.clone(),
        seeds: Seeds {
            seed: cfg.seed,
            split: cfg.seed,
            sweep: cfg.seed,
            oversample: cfg.seed,
            mlp: cfg.seed,
        },
        completed: error.is_none(),
        stages,
        stage_reached,
    };
    export::write_json(&manifest, &dir.join("manifest.json"))?;
    Ok(PipelineOutcome { dir, manifest, error })
}
