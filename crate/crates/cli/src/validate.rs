//! Accuracy of footer-only estimates against generated corpora.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::path::{Path, PathBuf};

use log::warn;
use ndv_scout_core::estimator::{combine, EstimatorConfig, SchemaConstraints};
use ndv_scout_core::ingest::{self, ColumnProfile};
use ndv_scout_core::{estimate_column, ColumnReport, EstimateOptions};
use ndv_scout_synth::{model_profile_from_truth, read_sidecar, sidecar_path, ColumnTruth};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::report::{FileError, SCHEMA_VERSION};

/// Final estimates of one column under each method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodEstimates {
    pub dict_only: Option<u64>,
    pub minmax_only: Option<u64>,
    pub hybrid: Option<u64>,
}

/// Run the pipeline, then re-combine with each signal alone under the same
/// bounds.
pub fn method_estimates(profile: &ColumnProfile) -> (ColumnReport, MethodEstimates) {
    let report = estimate_column(profile, &EstimateOptions::default());
    let cfg = EstimatorConfig::default();
    let none = SchemaConstraints::default();
    let single =
        |dict, minmax| combine(dict, minmax, profile, &report.distribution, &none, &cfg).ok().map(|e| e.ndv_final);
    let estimates = MethodEstimates {
        dict_only: single(report.dictionary.as_ref(), None),
        minmax_only: single(None, report.minmax.as_ref()),
        hybrid: report.estimate.as_ref().map(|e| e.ndv_final),
    };
    (report, estimates)
}

pub fn relative_error(estimate: Option<u64>, truth: u64) -> Option<f64> {
    estimate.map(|e| (e as f64 - truth as f64).abs() / truth.max(1) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub file: String,
    pub column: String,
    pub layout: String,
    pub ndv_true: u64,
    pub class: String,
    /// Estimates from the file's real footer.
    pub file_world: MethodEstimates,
    /// Estimates from a footer whose chunk sizes follow the storage
    /// equation exactly.
    pub model_world: MethodEstimates,
    pub ndv_dict_raw: Option<f64>,
    pub ndv_dict_model_raw: Option<f64>,
    pub rel_err_dict: Option<f64>,
    pub rel_err_minmax: Option<f64>,
    pub rel_err_hybrid: Option<f64>,
    pub rel_err_hybrid_model: Option<f64>,
    pub is_lower_bound: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub count: usize,
    pub missing: usize,
    pub median: Option<f64>,
    pub p90: Option<f64>,
}

impl ErrorStats {
    pub fn from_errors(errors: impl IntoIterator<Item = Option<f64>>) -> Self {
        let mut missing = 0;
        let mut v: Vec<f64> = errors
            .into_iter()
            .filter_map(|e| {
                missing += usize::from(e.is_none());
                e
            })
            .collect();
        v.sort_by(f64::total_cmp);
        Self { count: v.len(), missing, median: median(&v), p90: percentile(&v, 0.9) }
    }
}

pub fn median(sorted: &[f64]) -> Option<f64> {
    let n = sorted.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(sorted[n / 2]),
        _ => Some(0.5 * (sorted[n / 2 - 1] + sorted[n / 2])),
    }
}

/// Nearest-rank percentile of sorted values.
pub fn percentile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    Some(sorted[rank.clamp(1, sorted.len()) - 1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutSummary {
    pub layout: String,
    pub columns: usize,
    pub dict_only: ErrorStats,
    pub minmax_only: ErrorStats,
    pub hybrid: ErrorStats,
    pub hybrid_model: ErrorStats,
}

/// Relative gap between file-world and model-world dictionary estimates,
/// i.e. how far real chunk sizes stray from the storage equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WriterOverhead {
    pub columns: usize,
    pub median_dict_bias: Option<f64>,
    pub p90_abs_dict_bias: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub schema_version: u32,
    pub directory: String,
    pub rows: Vec<ValidationRow>,
    pub by_layout: Vec<LayoutSummary>,
    /// Layout label → detected class → column count.
    pub confusion: BTreeMap<String, BTreeMap<String, usize>>,
    pub writer_overhead: WriterOverhead,
    pub skipped: Vec<FileError>,
}

fn validate_column(file: &str, column: &str, profile: &ColumnProfile, truth: &ColumnTruth) -> ValidationRow {
    let (report, file_world) = method_estimates(profile);
    let model_profile = model_profile_from_truth(column, truth);
    let (model_report, model_world) = method_estimates(&model_profile);
    let t = truth.ndv_true;
    ValidationRow {
        file: file.to_string(),
        column: column.to_string(),
        layout: truth.layout.clone(),
        ndv_true: t,
        class: report.distribution.class.to_string(),
        file_world,
        model_world,
        ndv_dict_raw: report.dictionary.as_ref().map(|d| d.ndv_dict),
        ndv_dict_model_raw: model_report.dictionary.as_ref().map(|d| d.ndv_dict),
        rel_err_dict: relative_error(file_world.dict_only, t),
        rel_err_minmax: relative_error(file_world.minmax_only, t),
        rel_err_hybrid: relative_error(file_world.hybrid, t),
        rel_err_hybrid_model: relative_error(model_world.hybrid, t),
        is_lower_bound: report.estimate.is_some_and(|e| e.is_lower_bound),
    }
}

fn validate_file(path: &Path) -> Result<Vec<ValidationRow>, String> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let stem = crate::estimate::table_name(path);
    let sidecar = sidecar_path(dir, &stem);
    if !sidecar.exists() {
        return Err(format!("no sidecar {}", sidecar.display()));
    }
    let truth = read_sidecar(&sidecar).map_err(|e| e.to_string())?;
    let file = File::open(path).map_err(|e| e.to_string())?;
    let profiles = ingest::read_file_profiles(&file).map_err(|e| e.to_string())?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let mut rows = Vec::new();
    for profile in &profiles {
        match truth.columns.get(&profile.column_name) {
            Some(t) => rows.push(validate_column(&name, &profile.column_name, profile, t)),
            None => warn!("{name}: column {} missing from sidecar", profile.column_name),
        }
    }
    Ok(rows)
}

pub fn parquet_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "parquet"))
        .collect();
    files.sort();
    Ok(files)
}

/// Validate every `*.parquet` in `dir` that has a sidecar.
pub fn validate_dir(dir: &Path, jobs: usize) -> std::io::Result<ValidateReport> {
    let files = parquet_files(dir)?;
    let run = || files.par_iter().map(|p| (p, validate_file(p))).collect::<Vec<_>>();
    let results = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    };

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (path, result) in results {
        match result {
            Ok(r) => rows.extend(r),
            Err(error) => {
                warn!("skipping {}: {error}", path.display());
                skipped.push(FileError { path: path.display().to_string(), error });
            }
        }
    }
    Ok(summarize(dir.display().to_string(), rows, skipped))
}

pub fn summarize(directory: String, rows: Vec<ValidationRow>, skipped: Vec<FileError>) -> ValidateReport {
    let mut layouts: BTreeMap<String, Vec<&ValidationRow>> = BTreeMap::new();
    let mut confusion: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    for r in &rows {
        layouts.entry(r.layout.clone()).or_default().push(r);
        *confusion.entry(r.layout.clone()).or_default().entry(r.class.clone()).or_default() += 1;
    }
    let by_layout = layouts
        .into_iter()
        .map(|(layout, rs)| LayoutSummary {
            columns: rs.len(),
            dict_only: ErrorStats::from_errors(rs.iter().map(|r| r.rel_err_dict)),
            minmax_only: ErrorStats::from_errors(rs.iter().map(|r| r.rel_err_minmax)),
            hybrid: ErrorStats::from_errors(rs.iter().map(|r| r.rel_err_hybrid)),
            hybrid_model: ErrorStats::from_errors(rs.iter().map(|r| r.rel_err_hybrid_model)),
            layout,
        })
        .collect();

    let mut biases: Vec<f64> = rows
        .iter()
        .filter_map(|r| match (r.ndv_dict_raw, r.ndv_dict_model_raw) {
            (Some(f), Some(m)) if m > 0.0 => Some((f - m) / m),
            _ => None,
        })
        .collect();
    biases.sort_by(f64::total_cmp);
    let mut abs: Vec<f64> = biases.iter().map(|b| b.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let writer_overhead = WriterOverhead {
        columns: biases.len(),
        median_dict_bias: median(&biases),
        p90_abs_dict_bias: percentile(&abs, 0.9),
    };

    ValidateReport { schema_version: SCHEMA_VERSION, directory, rows, by_layout, confusion, writer_overhead, skipped }
}

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{:.1}%", 100.0 * v))
}

pub fn render_table(report: &ValidateReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:>5}  {:>16}  {:>16}  {:>16}  {:>16}",
        "layout", "cols", "dict med/p90", "minmax med/p90", "hybrid med/p90", "model med/p90"
    );
    for s in &report.by_layout {
        let cell = |e: &ErrorStats| format!("{}/{}", pct(e.median), pct(e.p90));
        let _ = writeln!(
            out,
            "{:<12} {:>5}  {:>16}  {:>16}  {:>16}  {:>16}",
            s.layout,
            s.columns,
            cell(&s.dict_only),
            cell(&s.minmax_only),
            cell(&s.hybrid),
            cell(&s.hybrid_model)
        );
    }
    let _ = writeln!(out, "\nclassification (layout: detected class counts)");
    for (layout, classes) in &report.confusion {
        let counts: Vec<String> = classes.iter().map(|(c, n)| format!("{c}={n}")).collect();
        let _ = writeln!(out, "  {layout:<12} {}", counts.join(" "));
    }
    let w = &report.writer_overhead;
    let _ = writeln!(
        out,
        "\nwriter overhead on dictionary estimate: median {} (p90 |bias| {}) over {} columns",
        pct(w.median_dict_bias),
        pct(w.p90_abs_dict_bias),
        w.columns
    );
    for s in &report.skipped {
        let _ = writeln!(out, "skipped {}: {}", s.path, s.error);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentiles() {
        let v = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
        assert_eq!(percentile(&v, 0.9), Some(0.9));
        assert_eq!(percentile(&v, 0.5), Some(0.5));
        assert_eq!(median(&v), Some(0.55));
        assert_eq!(median(&[3.0]), Some(3.0));
        assert_eq!(percentile(&[], 0.9), None);
        assert_eq!(percentile(&[2.0], 0.9), Some(2.0));
    }

    #[test]
    fn error_stats_count_missing() {
        let s = ErrorStats::from_errors([Some(0.2), None, Some(0.1)]);
        assert_eq!((s.count, s.missing), (2, 1));
        assert!((s.median.unwrap() - 0.15).abs() < 1e-12);
    }

    #[test]
    fn relative_errors() {
        assert_eq!(relative_error(Some(90), 100), Some(0.1));
        assert_eq!(relative_error(None, 100), None);
    }

    #[test]
    fn empty_directory_gives_empty_report() {
        let dir = tempfile::tempdir().unwrap();
        let r = validate_dir(dir.path(), 1).unwrap();
        assert!(r.rows.is_empty() && r.by_layout.is_empty() && r.skipped.is_empty());
        assert!(render_table(&r).contains("layout"));
    }
}
