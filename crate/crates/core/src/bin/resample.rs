//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 oversampling budget exhausted.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use resample_core::experiment::{self, CommandOutput, ExperimentConfig};
use resample_core::oversample::Algorithm;
use resample_core::undersample::RemovalOrder;
use resample_core::{Error, ErrorKind};

#[derive(Parser)]
#[command(name = "resample", version, about = "Silhouette-driven imbalancing and oversampling of binary datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-sample silhouette coefficients and bin percentages.
    Silhouette(Common),
    /// Remove growing fractions of one class and track classifier quality.
    ImbalanceSweep(Common),
    /// Oversample the minority of the training split up to balance.
    Rebalance(Common),
    /// Train the MLP and report metrics, loss curves and correlations.
    Evaluate(Common),
    /// Imbalance, rebalance and evaluate in one run with a manifest.
    Pipeline(Common),
    /// Write the configured synthetic dataset (the benchmark by default).
    Synth(Common),
}

#[derive(Args)]
struct Common {
    /// Headed CSV input.
    #[arg(long)]
    input: Option<PathBuf>,
    /// TOML experiment configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// smote, adasyn, g1no or g1no-gourmet.
    #[arg(long)]
    algorithm: Option<Algorithm>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Removal order for sweeps: asc, desc or random.
    #[arg(long)]
    order: Option<RemovalOrder>,
    /// Comma-separated removal fractions.
    #[arg(long, value_delimiter = ',')]
    fractions: Option<Vec<f64>>,
    /// Neighbours for SMOTE and ADASYN.
    #[arg(long)]
    k: Option<usize>,
    /// Silhouette bin thresholds as `low,high`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    bins: Option<Vec<f64>>,
    /// Label column name or zero-based index (default: last column).
    #[arg(long)]
    label_column: Option<String>,
    /// Use the whole input as training data.
    #[arg(long)]
    no_split: bool,
    /// Min-max scale every feature to [0, 1] after loading.
    #[arg(long)]
    scale: bool,
    /// Held-out CSV for `evaluate`.
    #[arg(long)]
    test: Option<PathBuf>,
    /// Cross-validation folds for sweeps; 0 or 1 uses a single holdout.
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
}

impl Common {
    fn resolve(self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.input {
            cfg.input = Some(v);
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.algorithm {
            cfg.algorithm = Some(v);
        }
        if let Some(v) = self.out {
            cfg.out = v;
        }
        if let Some(v) = self.order {
            cfg.sweep.order = v;
        }
        if let Some(v) = self.fractions {
            cfg.sweep.fractions = v;
        }
        if let Some(v) = self.k {
            cfg.k = v;
        }
        if let Some(v) = self.bins {
            match v[..] {
                [lo, hi] => cfg.bins = (lo, hi),
                _ => return Err(Error::Config("--bins takes two values: low,high".into())),
            }
        }
        if let Some(v) = self.label_column {
            cfg.label_column = Some(v);
        }
        if self.no_split {
            cfg.no_split = true;
        }
        if self.scale {
            cfg.scale = true;
        }
        if let Some(v) = self.test {
            cfg.test_input = Some(v);
        }
        if let Some(v) = self.folds {
            cfg.sweep.folds = v;
        }
        if let Some(v) = self.epochs {
            cfg.mlp.epochs = v;
        }
        Ok(cfg)
    }
}

fn exit_code(e: &Error) -> ExitCode {
    ExitCode::from(match e.kind() {
        ErrorKind::Usage => 1,
        ErrorKind::Data => 2,
        ErrorKind::Budget => 3,
    })
}

fn report_error(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    let mut source = std::error::Error::source(e);
    while let Some(s) = source {
        eprintln!("  caused by: {s}");
        source = s.source();
    }
    exit_code(e)
}

fn print_output(out: &CommandOutput) {
    println!("{}", out.summary);
    for f in &out.files {
        println!("wrote {}", f.display());
    }
}

type Runner = fn(&ExperimentConfig) -> Result<CommandOutput, Error>;

fn run(command: Command) -> Result<(), Error> {
    let (runner, common): (Runner, Common) = match command {
        Command::Silhouette(c) => (experiment::run_silhouette, c),
        Command::ImbalanceSweep(c) => (experiment::run_sweep, c),
        Command::Rebalance(c) => (experiment::run_rebalance, c),
        Command::Evaluate(c) => (experiment::run_evaluate, c),
        Command::Synth(c) => (experiment::run_synth, c),
        Command::Pipeline(c) => {
            let cfg = c.resolve()?;
            let outcome = experiment::run_pipeline(&cfg)?;
            for stage in &outcome.manifest.stages {
                println!("{:<10} {:?}", stage.name, stage.status);
            }
            println!("wrote {}", outcome.dir.join("manifest.json").display());
            return outcome.error.map_or(Ok(()), Err);
        }
    };
    let cfg = common.resolve()?;
    print_output(&runner(&cfg)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(&e),
    }
}
