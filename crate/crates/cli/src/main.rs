//! `fetal-biometry`: measure volumes, generate phantoms, evaluate reports.
//!
//! Exit status is 0 on success (warnings allowed), 1 for input errors and 2
//! when the pipeline itself fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fetal_biometry::eval::{load_reports, run_eval};
use fetal_biometry::io::{
    read_json, read_labels, read_probabilities, read_reference, read_volume, write_json, write_phantom, Inputs,
    ReportFile,
};
use fetal_biometry::phantom::{generate, PhantomSpec};
use fetal_biometry::pipeline::{run_pipeline, PipelineConfig};
use fetal_biometry::Error;

#[derive(Parser)]
#[command(name = "fetal-biometry", version, about = "Fetal brain CBD, BBD and TCD from MRI volumes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure one volume and write a report.
    Measure {
        /// Volume header (JSON).
        #[arg(long)]
        volume: PathBuf,
        /// Label map header (JSON).
        #[arg(long)]
        labels: PathBuf,
        /// Slice probabilities (JSON).
        #[arg(long)]
        probs: PathBuf,
        /// Report output path.
        #[arg(long)]
        out: PathBuf,
        /// Pipeline configuration (JSON); missing fields take defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Volume identifier; defaults to the volume file stem without `_volume`.
        #[arg(long)]
        id: Option<String>,
    },
    /// Generate a synthetic phantom with its ground truth.
    Phantom {
        /// Phantom spec (JSON); missing fields take defaults.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Compare a directory of reports with a reference table.
    Eval {
        /// Directory holding report files.
        #[arg(long)]
        pred: PathBuf,
        /// Reference CSV.
        #[arg(long = "ref")]
        reference: PathBuf,
        /// Statistics output path.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Input(anyhow::Error),
    Pipeline(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.into())
        } else {
            Failure::Pipeline(e.into())
        }
    }
}

trait Input<T> {
    fn input(self, what: &str) -> Result<T, Failure>;
}

impl<T> Input<T> for Result<T, Error> {
    fn input(self, what: &str) -> Result<T, Failure> {
        self.map_err(|e| Failure::Input(anyhow::Error::new(e).context(what.to_string())))
    }
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn volume_id(volume: &Path) -> String {
    let stem = volume.file_stem().and_then(|s| s.to_str()).unwrap_or("volume");
    stem.strip_suffix("_volume").unwrap_or(stem).to_string()
}

fn measure(
    volume: &Path,
    labels: &Path,
    probs: &Path,
    out: &Path,
    config: Option<&Path>,
    id: Option<String>,
) -> Result<(), Failure> {
    let cfg: PipelineConfig = match config {
        Some(p) => read_json(p).input("reading the config")?,
        None => PipelineConfig::default(),
    };
    cfg.validate().input("checking the config")?;
    let vol = read_volume(volume).input("reading the volume")?;
    let lab = read_labels(labels).input("reading the labels")?;
    let source = read_probabilities(probs).input("reading the probabilities")?;
    let report = run_pipeline(&vol, &lab, &source, &cfg)?;
    let id = id.unwrap_or_else(|| volume_id(volume));
    let inputs = Inputs {
        volume: Some(display(volume)),
        labels: Some(display(labels)),
        probabilities: Some(display(probs)),
        config: config.map(display),
    };
    let file = ReportFile::new(&report, &id, inputs, &cfg);
    write_json(out, &file).input("writing the report")?;
    for w in &report.warnings {
        eprintln!("warning {}: {}", w.code, w.detail);
    }
    for e in &report.errors {
        eprintln!("stage {} failed: {}", e.stage, e.message);
    }
    Ok(())
}

fn phantom(spec: Option<&Path>, seed: u64, out_dir: &Path) -> Result<(), Failure> {
    let mut spec: PhantomSpec = match spec {
        Some(p) => read_json(p).input("reading the phantom spec")?,
        None => PhantomSpec::default(),
    };
    spec.seed = seed;
    let p = generate(&spec).input("generating the phantom")?;
    let id = format!("phantom_s{seed}");
    let files = write_phantom(out_dir, &id, &p).input("writing the phantom")?;
    println!("{}", files.volume.display());
    Ok(())
}

fn eval(pred: &Path, reference: &Path, out: &Path) -> Result<(), Failure> {
    let reports = load_reports(pred).input("reading the reports")?;
    let rows = read_reference(reference).input("reading the reference table")?;
    let stats = run_eval(&reports, &rows).input("matching reports to the reference")?;
    write_json(out, &stats).input("writing the statistics")?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Measure {
            volume,
            labels,
            probs,
            out,
            config,
            id,
        } => measure(volume, labels, probs, out, config.as_deref(), id.clone()),
        Command::Phantom { spec, seed, out_dir } => phantom(spec.as_deref(), *seed, out_dir),
        Command::Eval { pred, reference, out } => eval(pred, reference, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Pipeline(e)) => {
            let e = e.context("pipeline failed");
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
