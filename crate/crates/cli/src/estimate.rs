use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use log::{debug, warn};
use ndv_scout_core::estimator::SchemaConstraints;
use ndv_scout_core::ingest::{self, ByteSource, IngestError};
use ndv_scout_core::{estimate_column, EstimateOptions};
use rayon::prelude::*;
use thiserror::Error;

use crate::report::{ColumnEntry, FileError, FileReport, Report, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum ConstraintsError {
    #[error("cannot read constraints file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("constraints file {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

/// Schema bounds keyed `"<table>.<column>"`, where the table is the file
/// stem (`orders.parquet` → `orders`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintsFile {
    bounds: BTreeMap<String, u64>,
}

impl ConstraintsFile {
    pub fn load(path: &Path) -> Result<Self, ConstraintsError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConstraintsError::Io { path: path.into(), source })?;
        Self::parse(&text).map_err(|message| ConstraintsError::Parse { path: path.into(), message })
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let bounds: BTreeMap<String, u64> = serde_path_to_error::deserialize(de).map_err(|e| {
            let inner = e.inner();
            format!("line {} column {} at {}: {inner}", inner.line(), inner.column(), e.path())
        })?;
        for (key, value) in &bounds {
            if !key.contains('.') {
                return Err(format!("key {key:?} must be \"<table>.<column>\""));
            }
            if *value == 0 {
                return Err(format!("bound for {key:?} must be >= 1"));
            }
        }
        Ok(Self { bounds })
    }

    /// Bounds for one file, keyed by column name.
    pub fn for_table(&self, table: &str) -> SchemaConstraints {
        let prefix = format!("{table}.");
        let bounds =
            self.bounds.iter().filter_map(|(k, v)| k.strip_prefix(&prefix).map(|col| (col.to_string(), *v))).collect();
        SchemaConstraints::new(bounds).expect("bounds validated on load")
    }
}

pub fn table_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

#[derive(Debug, Clone, Default)]
pub struct EstimateRequest {
    pub columns: Option<Vec<String>>,
    pub batch_bytes: Option<u64>,
    pub constraints: ConstraintsFile,
    pub explain: bool,
}

/// Estimate every selected column of one file read through `source`.
pub fn estimate_file_source<S: ByteSource + ?Sized>(
    display_path: &str,
    table: &str,
    source: &S,
    request: &EstimateRequest,
) -> Result<FileReport, IngestError> {
    let file = ingest::read_file(source)?;
    let options = EstimateOptions {
        batch_bytes: request.batch_bytes,
        constraints: request.constraints.for_table(table),
        ..Default::default()
    };
    let mut columns: Vec<ColumnEntry> = file
        .columns
        .iter()
        .filter(|p| request.columns.as_ref().is_none_or(|cols| cols.contains(&p.column_name)))
        .map(|p| ColumnEntry::from_report(estimate_column(p, &options), request.explain))
        .collect();
    columns.sort_by(|a, b| a.column.cmp(&b.column));
    Ok(FileReport {
        path: display_path.to_string(),
        file_rows: file.num_rows,
        row_groups: file.num_row_groups,
        footer_bytes: file.footer_range.end - file.footer_range.start,
        columns,
    })
}

#[derive(Debug, Error)]
pub enum FileFailure {
    #[error("cannot open: {0}")]
    Open(#[from] std::io::Error),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

pub fn estimate_path(path: &Path, request: &EstimateRequest) -> Result<FileReport, FileFailure> {
    let file = File::open(path)?;
    debug!("estimating {}", path.display());
    Ok(estimate_file_source(&path.display().to_string(), &table_name(path), &file, request)?)
}

/// Run estimation over `paths` on up to `jobs` threads. Output is sorted by
/// path; per-file failures are collected, not fatal.
pub fn estimate_paths(paths: &[PathBuf], request: &EstimateRequest, jobs: usize) -> Report {
    let mut sorted = paths.to_vec();
    sorted.sort();
    sorted.dedup();
    let run = || sorted.par_iter().map(|p| (p, estimate_path(p, request))).collect::<Vec<_>>();
    let results = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(run),
        Err(e) => {
            warn!("thread pool unavailable ({e}); running sequentially");
            run()
        }
    };

    let mut report = Report { schema_version: SCHEMA_VERSION, files: Vec::new(), errors: Vec::new() };
    for (path, result) in results {
        match result {
            Ok(f) => report.files.push(f),
            Err(e) => report.errors.push(FileError { path: path.display().to_string(), error: e.to_string() }),
        }
    }
    if let Some(cols) = &request.columns {
        for c in cols {
            if !report.files.iter().any(|f| f.columns.iter().any(|e| e.column == *c)) {
                warn!("column {c:?} not found in any file");
            }
        }
    }
    report
}
