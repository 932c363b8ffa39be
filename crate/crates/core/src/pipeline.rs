//! Per-column estimation over footer metadata.

use serde::{Deserialize, Serialize};

use crate::dict::{self, DictInversionResult, MeanLength};
use crate::distribution::{self, DistributionReport};
use crate::estimator::{self, BatchMemoryEstimate, EstimatorConfig, NdvEstimate, NoEstimate, SchemaConstraints};
use crate::ingest::{self, ByteSource, ColumnProfile, ColumnType, IngestError, StatsCompleteness};
use crate::minmax::{self, MinMaxDiversityResult};

#[derive(Debug, Clone, Default)]
pub struct EstimateOptions {
    /// Batch size in bytes; enables the batch memory estimate.
    pub batch_bytes: Option<u64>,
    pub constraints: SchemaConstraints,
    pub config: EstimatorConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum Warning {
    /// The final estimate is known to undershoot.
    LowerBound,
    /// Chunks look plain-encoded; dictionary inversion saw at most one value
    /// per row.
    PlainFallback,
    Unanalyzable {
        reason: String,
    },
    DictionaryUnavailable {
        reason: String,
    },
    MinMaxUnavailable {
        reason: String,
    },
    ChunksNotInvertible {
        count: usize,
    },
    SolverNotConverged,
    /// The length behind the storage equation is a sample mean over a few
    /// extrema rather than an exact width.
    EstimatedLength {
        sample_size: usize,
    },
    BatchModelNotApplicable,
    IncompleteNullCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnReport {
    pub column_name: String,
    pub column_type: ColumnType,
    pub total_rows: u64,
    pub null_rows: u64,
    pub row_groups: usize,
    pub estimate: Option<NdvEstimate>,
    pub no_estimate_reason: Option<NoEstimate>,
    pub dictionary: Option<DictInversionResult>,
    pub minmax: Option<MinMaxDiversityResult>,
    pub distribution: DistributionReport,
    pub batch_memory: Option<BatchMemoryEstimate>,
    pub stats_completeness: StatsCompleteness,
    pub warnings: Vec<Warning>,
}

pub fn estimate_column(profile: &ColumnProfile, options: &EstimateOptions) -> ColumnReport {
    let mut warnings = Vec::new();
    if !profile.stats_completeness.null_counts_complete() {
        warnings.push(Warning::IncompleteNullCounts);
    }

    let extrema = minmax::count_distinct_extrema(profile).ok();
    let minmax = match extrema.as_ref().map(minmax::estimate_from_extrema) {
        Some(Ok(r)) => Some(r),
        Some(Err(e)) => {
            warnings.push(Warning::MinMaxUnavailable { reason: e.to_string() });
            None
        }
        None => {
            warnings.push(Warning::MinMaxUnavailable { reason: minmax::MinMaxError::NoStatistics.to_string() });
            None
        }
    };

    let len = dict::estimate_mean_length(profile, extrema.as_ref());
    let dictionary = match len.clone().and_then(|l| dict::estimate_column_ndv_dict(profile, l)) {
        Ok(r) => Some(r),
        Err(e) => {
            warnings.push(Warning::DictionaryUnavailable { reason: e.to_string() });
            None
        }
    };
    if let Ok(MeanLength { sample_size, .. }) = len {
        if sample_size > 0 && dictionary.is_some() {
            warnings.push(Warning::EstimatedLength { sample_size });
        }
    }
    if let Some(d) = &dictionary {
        if d.plain_fallback {
            warnings.push(Warning::PlainFallback);
        }
        if d.chunks_not_invertible > 0 {
            warnings.push(Warning::ChunksNotInvertible { count: d.chunks_not_invertible });
        }
    }
    if dictionary.as_ref().is_some_and(|d| !d.converged) || minmax.as_ref().is_some_and(|m| !m.converged) {
        warnings.push(Warning::SolverNotConverged);
    }

    let report = distribution::analyze(profile);
    if !report.analyzable {
        let reason = if report.uninterpretable_ranges > 0 {
            format!("{} ranges with uninterpretable statistics", report.uninterpretable_ranges)
        } else {
            format!("{} ranges with statistics, need at least 2", report.n_ranges)
        };
        warnings.push(Warning::Unanalyzable { reason });
    }

    let combined = estimator::combine(
        dictionary.as_ref(),
        minmax.as_ref(),
        profile,
        &report,
        &options.constraints,
        &options.config,
    );
    let (estimate, no_estimate_reason) = match combined {
        Ok(e) => (Some(e), None),
        Err(r) => (None, Some(r)),
    };
    if estimate.as_ref().is_some_and(|e| e.is_lower_bound) {
        warnings.push(Warning::LowerBound);
    }

    let batch_memory = match (options.batch_bytes, &estimate, &len) {
        (Some(b), Some(e), Ok(l)) => {
            let m = estimator::total_batch_memory(
                e.ndv_final as f64,
                l.len,
                profile.total_values,
                profile.total_nulls,
                b as f64,
                report.class,
            );
            if !m.applicable {
                warnings.push(Warning::BatchModelNotApplicable);
            }
            Some(m)
        }
        _ => None,
    };

    ColumnReport {
        column_name: profile.column_name.clone(),
        column_type: profile.column_type,
        total_rows: profile.total_values,
        null_rows: profile.total_nulls,
        row_groups: profile.chunks.len(),
        estimate,
        no_estimate_reason,
        dictionary,
        minmax,
        distribution: report,
        batch_memory,
        stats_completeness: profile.stats_completeness.clone(),
        warnings,
    }
}

/// Read a file's footer from `source` and estimate every leaf column.
pub fn estimate_source<S: ByteSource + ?Sized>(
    source: &S,
    options: &EstimateOptions,
) -> Result<Vec<ColumnReport>, IngestError> {
    let profiles = ingest::read_file_profiles(source)?;
    Ok(profiles.iter().map(|p| estimate_column(p, options)).collect())
}
