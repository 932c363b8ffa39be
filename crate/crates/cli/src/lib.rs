//! `ndv-scout`: estimate distinct-value counts of Parquet columns from the
//! footer alone, generate synthetic corpora with ground truth, and measure
//! estimator accuracy against them.

pub mod estimate;
pub mod generate;
pub mod report;
pub mod validate;

use std::io::Write;
use std::num::{NonZeroU64, NonZeroUsize};
use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use crate::estimate::{ConstraintsFile, EstimateRequest};

/// Exit status for malformed input files.
pub const EXIT_MALFORMED: i32 = 1;
/// Exit status for invalid arguments or unusable inputs.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ndv-scout", version, about = "Footer-only NDV estimation for Parquet files")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate per-column NDV from Parquet footers.
    Estimate {
        /// Parquet files, or directories whose *.parquet files are read.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Only report these columns (comma separated).
        #[arg(long, value_delimiter = ',')]
        columns: Option<Vec<String>>,
        /// Execution batch size in bytes; enables dictionary memory estimates.
        #[arg(long)]
        batch_size: Option<NonZeroU64>,
        /// JSON file mapping "table.column" to a maximum NDV.
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Include per-method diagnostics.
        #[arg(long)]
        explain: bool,
        /// Files processed concurrently.
        #[arg(long, default_value_t = default_jobs())]
        jobs: NonZeroUsize,
    },
    /// Write a synthetic corpus with ground-truth sidecars.
    Generate {
        /// Corpus spec (JSON).
        spec: PathBuf,
        out_dir: PathBuf,
        #[arg(long, default_value_t = default_jobs())]
        jobs: NonZeroUsize,
    },
    /// Compare estimates against sidecar ground truth.
    Validate {
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long, default_value_t = default_jobs())]
        jobs: NonZeroUsize,
    },
    /// Print the built-in four-layout corpus spec.
    DefaultSpec,
}

fn default_jobs() -> NonZeroUsize {
    std::thread::available_parallelism().unwrap_or(NonZeroUsize::MIN)
}

/// A failure that maps to the usage exit status.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn expand_paths(paths: &[PathBuf]) -> anyhow::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            out.extend(validate::parquet_files(p).with_context(|| format!("cannot list {}", p.display()))?);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn write_json<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Run one command, writing its report to `out`. Returns the exit status;
/// argument and input problems surface as [`UsageError`].
pub fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<i32> {
    match cli.command {
        Command::Estimate { paths, columns, batch_size, constraints, format, explain, jobs } => {
            let constraints = match constraints {
                Some(p) => ConstraintsFile::load(&p).map_err(|e| UsageError(e.to_string()))?,
                None => ConstraintsFile::default(),
            };
            let request =
                EstimateRequest { columns, batch_bytes: batch_size.map(NonZeroU64::get), constraints, explain };
            let paths = expand_paths(&paths).map_err(|e| UsageError(format!("{e:#}")))?;
            let report = estimate::estimate_paths(&paths, &request, jobs.get());
            for e in &report.errors {
                eprintln!("error: {}: {}", e.path, e.error);
            }
            match format {
                Format::Json => write_json(out, &report)?,
                Format::Table => write!(out, "{}", report::render_table(&report))?,
            }
            Ok(if report.errors.is_empty() { 0 } else { EXIT_MALFORMED })
        }
        Command::Generate { spec, out_dir, jobs } => {
            let corpus = generate::load_spec(&spec).map_err(|e| UsageError(e.to_string()))?;
            let truths = generate::generate_corpus(&corpus, &out_dir, jobs.get())?;
            for t in &truths {
                info!("wrote {} ({} rows, {} row groups)", t.file, t.rows, t.row_groups);
                writeln!(out, "{}", ndv_scout_synth::parquet_path(&out_dir, &corpus_name(&t.file)).display())?;
            }
            Ok(0)
        }
        Command::Validate { dir, format, jobs } => {
            if !dir.is_dir() {
                return Err(UsageError(format!("{} is not a directory", dir.display())).into());
            }
            let report = validate::validate_dir(&dir, jobs.get())?;
            match format {
                Format::Json => write_json(out, &report)?,
                Format::Table => write!(out, "{}", validate::render_table(&report))?,
            }
            Ok(0)
        }
        Command::DefaultSpec => {
            write!(out, "{}", generate::DEFAULT_SPEC)?;
            Ok(0)
        }
    }
}

fn corpus_name(file: &str) -> String {
    file.strip_suffix(".parquet").unwrap_or(file).to_string()
}
