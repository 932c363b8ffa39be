//! NDV from dictionary-encoded chunk sizes.
//!
//! A dictionary-encoded chunk stores each distinct value once plus one
//! bit-packed index per non-null row, so its uncompressed size is
//!
//! ```text
//! S = ndv * len + (N - nulls) * ceil(log2(ndv)) / 8
//! ```
//!
//! Given `S`, `N`, `nulls` and the mean value length, the equation is solved
//! for `ndv` per chunk and the chunk estimates are aggregated by maximum.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::ColumnProfile;
use crate::minmax::DistinctExtrema;
use crate::numeric::{self, RootProblem};

/// Plain-encoding detector: minimum `ndv / non_null` ratio.
pub const FALLBACK_NDV_RATIO: f64 = 0.9;
/// Plain-encoding detector: accepted range of `S / (non_null * len)`.
pub const FALLBACK_SIZE_RATIO: (f64, f64) = (0.8, 1.2);
/// Share of rows in non-dictionary chunks above which a column is treated as
/// plain-encoded.
pub const PLAIN_ROWS_DOMINANCE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DictError {
    #[error("chunk size {size} bytes is below the single-value minimum {minimum}")]
    NotInvertible { size: f64, minimum: f64 },
    #[error("chunk has no non-null values")]
    NoNonNullValues,
    #[error("no dictionary-encoded chunks")]
    NoDictionaryChunks,
    #[error("variable-length column without min/max statistics")]
    NoLengthEvidence,
    #[error(transparent)]
    Solver(#[from] numeric::SolveError),
}

/// Bits needed to index a dictionary of `ndv` entries; zero for a single entry.
pub fn index_bits(ndv: f64) -> f64 {
    if ndv <= 1.0 {
        0.0
    } else {
        ndv.log2().ceil()
    }
}

/// Uncompressed size of a dictionary-encoded chunk.
pub fn storage_size(ndv: f64, len: f64, values: u64, nulls: u64) -> f64 {
    let non_null = values.saturating_sub(nulls) as f64;
    ndv * len + non_null * index_bits(ndv) / 8.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub ndv: f64,
    /// Real-valued solver output before snapping to an integer.
    pub raw_root: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Solve the storage equation for `ndv` given a chunk's observed size.
///
/// The result is an integer in `[1, values - nulls]`: the solver's real root
/// is snapped to the integer with the smallest equation residual among the
/// root's bit-width bucket and its two neighbours.
pub fn invert_storage_size(size: f64, values: u64, nulls: u64, len: f64) -> Result<Inversion, DictError> {
    let non_null = values.saturating_sub(nulls);
    if non_null == 0 {
        return Err(DictError::NoNonNullValues);
    }
    let minimum = storage_size(1.0, len, values, nulls);
    if size < minimum {
        return Err(DictError::NotInvertible { size, minimum });
    }
    let upper = non_null as f64;
    let exact = |ndv: f64| Inversion { ndv, raw_root: ndv, converged: true, iterations: 0 };
    if non_null == 1 {
        return Ok(exact(1.0));
    }
    if size >= storage_size(upper, len, values, nulls) {
        // More bytes than one dictionary entry per row can explain.
        return Ok(exact(upper));
    }

    let objective = |ndv: f64| storage_size(ndv, len, values, nulls) - size;
    let derivative = |ndv: f64| len + non_null as f64 / (8.0 * ndv * std::f64::consts::LN_2);
    let guess = (size / len).clamp(1.0, upper);
    let problem = RootProblem::new(objective, derivative, guess, 1.0, upper)?;
    let root = numeric::solve(&problem)?;

    let ndv = snap_to_bucket(root.value, size, len, values, nulls);
    Ok(Inversion { ndv, raw_root: root.value, converged: root.converged, iterations: root.iterations })
}

fn snap_to_bucket(root: f64, size: f64, len: f64, values: u64, nulls: u64) -> f64 {
    let non_null = values.saturating_sub(nulls) as f64;
    let bucket = index_bits(root.clamp(1.0, non_null)) as i32;
    let residual = |ndv: f64| (storage_size(ndv, len, values, nulls) - size).abs();
    let mut best: Option<(f64, f64)> = None;
    for bits in (bucket - 1).max(0)..=bucket + 1 {
        let lo = if bits == 0 { 1.0 } else { 2f64.powi(bits - 1) + 1.0 };
        let hi = 2f64.powi(bits).min(non_null);
        if lo > hi {
            continue;
        }
        // Within a bucket the equation is linear with slope `len`.
        let fixed = non_null * f64::from(bits) / 8.0;
        let candidate = ((size - fixed) / len).round().clamp(lo, hi);
        let r = residual(candidate);
        let better = match best {
            None => true,
            Some((best_r, best_c)) => r < best_r || (r == best_r && (candidate - root).abs() < (best_c - root).abs()),
        };
        if better {
            best = Some((r, candidate));
        }
    }
    best.map_or(1.0, |(_, c)| c)
}

/// Mean value length used by the storage equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanLength {
    pub len: f64,
    /// Number of distinct extrema the mean was taken over; 0 means the width
    /// is exact from the schema.
    pub sample_size: usize,
}

impl MeanLength {
    pub fn is_exact(&self) -> bool {
        self.sample_size == 0
    }
}

/// Exact width for fixed-width types, else the mean byte length of the
/// distinct row-group extrema.
pub fn estimate_mean_length(
    profile: &ColumnProfile,
    extrema: Option<&DistinctExtrema>,
) -> Result<MeanLength, DictError> {
    if let Some(width) = profile.fixed_width {
        return Ok(MeanLength { len: f64::from(width), sample_size: 0 });
    }
    let mut ranged = profile.ranged_chunks();
    if let (Some(only), None) = (ranged.next(), ranged.next()) {
        let (lo, hi) = only.range().expect("ranged chunk");
        let len = (lo.byte_len() + hi.byte_len()) as f64 / 2.0;
        let sample_size = if lo == hi { 1 } else { 2 };
        return positive(MeanLength { len, sample_size });
    }
    let extrema = extrema.ok_or(DictError::NoLengthEvidence)?;
    if extrema.values.is_empty() {
        return Err(DictError::NoLengthEvidence);
    }
    let total: usize = extrema.values.iter().map(|v| v.byte_len()).sum();
    positive(MeanLength { len: total as f64 / extrema.values.len() as f64, sample_size: extrema.values.len() })
}

fn positive(len: MeanLength) -> Result<MeanLength, DictError> {
    if len.len > 0.0 {
        Ok(len)
    } else {
        Err(DictError::NoLengthEvidence)
    }
}

/// True when a chunk looks plain-encoded: the solver places ndv near the
/// non-null count and the size is roughly one raw value per row.
pub fn detect_plain_fallback(ndv: f64, values: u64, nulls: u64, size: f64, len: f64) -> bool {
    let non_null = values.saturating_sub(nulls) as f64;
    if non_null == 0.0 || len <= 0.0 {
        return false;
    }
    let size_ratio = size / (non_null * len);
    ndv / non_null >= FALLBACK_NDV_RATIO && (FALLBACK_SIZE_RATIO.0..=FALLBACK_SIZE_RATIO.1).contains(&size_ratio)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DictInversionResult {
    pub ndv_dict: f64,
    /// One entry per dictionary-encoded chunk that could be inverted, in
    /// row-group order.
    pub per_chunk_ndv: Vec<f64>,
    pub mean_len_bytes: f64,
    pub len_sample_size: usize,
    pub plain_fallback: bool,
    pub converged: bool,
    pub iterations_max: usize,
    /// Dictionary chunks whose size was inconsistent with the model.
    pub chunks_not_invertible: usize,
}

/// Invert every dictionary-encoded chunk and keep the largest estimate.
pub fn estimate_column_ndv_dict(profile: &ColumnProfile, len: MeanLength) -> Result<DictInversionResult, DictError> {
    let dict_chunks: Vec<_> = profile.chunks.iter().filter(|c| c.dictionary_encoded && c.non_null() > 0).collect();
    if dict_chunks.is_empty() {
        return Err(DictError::NoDictionaryChunks);
    }

    let mut per_chunk = Vec::with_capacity(dict_chunks.len());
    let mut best: Option<(f64, usize)> = None;
    let mut not_invertible = 0;
    let mut last_err = None;
    let mut converged = true;
    let mut iterations_max = 0;
    for (i, chunk) in dict_chunks.iter().enumerate() {
        match invert_storage_size(chunk.uncompressed_size as f64, chunk.value_count, chunk.nulls(), len.len) {
            Ok(inv) => {
                converged &= inv.converged;
                iterations_max = iterations_max.max(inv.iterations);
                if best.is_none_or(|(ndv, _)| inv.ndv > ndv) {
                    best = Some((inv.ndv, i));
                }
                per_chunk.push(inv.ndv);
            }
            Err(e) => {
                not_invertible += 1;
                last_err = Some(e);
            }
        }
    }
    let Some((ndv_dict, winner)) = best else {
        return Err(last_err.unwrap_or(DictError::NoDictionaryChunks));
    };

    let w = dict_chunks[winner];
    let mut plain_fallback =
        detect_plain_fallback(ndv_dict, w.value_count, w.nulls(), w.uncompressed_size as f64, len.len);
    let plain_rows: u64 = profile.chunks.iter().filter(|c| !c.dictionary_encoded).map(|c| c.value_count).sum();
    if profile.total_values > 0 && plain_rows as f64 > PLAIN_ROWS_DOMINANCE * profile.total_values as f64 {
        plain_fallback = true;
    }

    Ok(DictInversionResult {
        ndv_dict,
        per_chunk_ndv: per_chunk,
        mean_len_bytes: len.len,
        len_sample_size: len.sample_size,
        plain_fallback,
        converged,
        iterations_max,
        chunks_not_invertible: not_invertible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{ColumnChunkMeta, ColumnType, LogicalKind, PhysicalType, StatValue};

    /// Integer minimizing |residual| over all of 1..=upper.
    fn brute_force(size: f64, values: u64, nulls: u64, len: f64) -> f64 {
        let upper = values - nulls;
        (1..=upper)
            .map(|n| n as f64)
            .min_by(|a, b| {
                let ra = (storage_size(*a, len, values, nulls) - size).abs();
                let rb = (storage_size(*b, len, values, nulls) - size).abs();
                ra.partial_cmp(&rb).unwrap()
            })
            .unwrap()
    }

    #[test]
    fn storage_size_examples() {
        assert_eq!(storage_size(1.0, 4.0, 10, 0), 4.0);
        assert_eq!(storage_size(3.0, 6.0, 100, 0), 43.0);
        assert_eq!(storage_size(10_000.0, 8.0, 1_000_000, 0), 1_830_000.0);
    }

    #[test]
    fn storage_size_strictly_increasing_across_buckets() {
        for len in [1.0, 4.0, 37.0] {
            let mut prev = storage_size(1.0, len, 100_000, 0);
            for ndv in 2..5000 {
                let s = storage_size(ndv as f64, len, 100_000, 0);
                assert!(s > prev, "ndv {ndv} len {len}");
                prev = s;
            }
        }
    }

    #[test]
    fn invert_round_trip_example() {
        let inv = invert_storage_size(1_830_000.0, 1_000_000, 0, 8.0).unwrap();
        assert_eq!(inv.ndv, brute_force(1_830_000.0, 1_000_000, 0, 8.0));
        assert_eq!(inv.ndv, 10_000.0);
        assert!(inv.converged);
    }

    #[test]
    fn invert_small_examples() {
        let inv = invert_storage_size(43.0, 100, 0, 6.0).unwrap();
        assert_eq!(inv.ndv, brute_force(43.0, 100, 0, 6.0));
        assert_eq!(inv.ndv, 3.0);
        assert_eq!(invert_storage_size(4.0, 10, 0, 4.0).unwrap().ndv, 1.0);
    }

    #[test]
    fn invert_matches_brute_force_on_small_sizes() {
        for size in (4..600).map(f64::from) {
            let inv = invert_storage_size(size, 200, 20, 4.0).unwrap();
            let bf = brute_force(size, 200, 20, 4.0);
            let r_inv = (storage_size(inv.ndv, 4.0, 200, 20) - size).abs();
            let r_bf = (storage_size(bf, 4.0, 200, 20) - size).abs();
            assert!(r_inv <= r_bf + 1e-9, "size {size}: {} (r={r_inv}) vs {bf} (r={r_bf})", inv.ndv);
        }
    }

    #[test]
    fn invert_rejects_undersized() {
        assert!(matches!(invert_storage_size(3.0, 10, 0, 4.0), Err(DictError::NotInvertible { .. })));
        assert!(matches!(invert_storage_size(30.0, 10, 10, 4.0), Err(DictError::NoNonNullValues)));
    }

    #[test]
    fn invert_clamps_oversized_to_non_null() {
        let inv = invert_storage_size(1e9, 1000, 100, 4.0).unwrap();
        assert_eq!(inv.ndv, 900.0);
    }

    #[test]
    fn fallback_predicate() {
        assert!(detect_plain_fallback(95.0, 100, 0, 400.0, 4.0));
        assert!(!detect_plain_fallback(50.0, 100, 0, 400.0, 4.0));
        assert!(!detect_plain_fallback(95.0, 100, 0, 1000.0, 4.0));
        // Boundaries are inclusive.
        assert!(detect_plain_fallback(90.0, 100, 0, 320.0, 4.0));
        assert!(detect_plain_fallback(90.0, 100, 0, 480.0, 4.0));
    }

    fn string_chunk(i: usize, min: &str, max: &str) -> ColumnChunkMeta {
        ColumnChunkMeta {
            row_group_index: i,
            uncompressed_size: 100,
            value_count: 10,
            null_count: Some(0),
            min_value: Some(StatValue(min.as_bytes().to_vec())),
            max_value: Some(StatValue(max.as_bytes().to_vec())),
            dictionary_encoded: true,
            physical_type: PhysicalType::ByteArray,
        }
    }

    const STRING: ColumnType = ColumnType::new(PhysicalType::ByteArray, LogicalKind::String);

    #[test]
    fn mean_length_fixed_width() {
        let ty = ColumnType::new(PhysicalType::Int64, LogicalKind::Integer);
        let mut chunk = string_chunk(0, "", "");
        chunk.physical_type = PhysicalType::Int64;
        let profile = ColumnProfile::new("c", ty, Some(8), vec![chunk]).unwrap();
        let len = estimate_mean_length(&profile, None).unwrap();
        assert_eq!(len, MeanLength { len: 8.0, sample_size: 0 });
        assert!(len.is_exact());
    }

    #[test]
    fn mean_length_over_distinct_extrema() {
        let profile =
            ColumnProfile::new("c", STRING, None, vec![string_chunk(0, "aa", "cccc"), string_chunk(1, "bbb", "cccc")])
                .unwrap();
        let extrema = crate::minmax::count_distinct_extrema(&profile).unwrap();
        let len = estimate_mean_length(&profile, Some(&extrema)).unwrap();
        assert_eq!(len, MeanLength { len: 3.0, sample_size: 3 });
    }

    #[test]
    fn mean_length_single_row_group() {
        let profile = ColumnProfile::new("c", STRING, None, vec![string_chunk(0, "ab", "abcd")]).unwrap();
        let len = estimate_mean_length(&profile, None).unwrap();
        assert_eq!(len.len, 3.0);
    }

    #[test]
    fn mean_length_needs_evidence() {
        let mut chunk = string_chunk(0, "a", "b");
        chunk.min_value = None;
        let profile = ColumnProfile::new("c", STRING, None, vec![chunk]).unwrap();
        assert!(matches!(estimate_mean_length(&profile, None), Err(DictError::NoLengthEvidence)));
    }

    fn int_chunk(i: usize, size: u64, values: u64, dict: bool) -> ColumnChunkMeta {
        ColumnChunkMeta {
            row_group_index: i,
            uncompressed_size: size,
            value_count: values,
            null_count: Some(0),
            min_value: None,
            max_value: None,
            dictionary_encoded: dict,
            physical_type: PhysicalType::Int64,
        }
    }

    const INT64: ColumnType = ColumnType::new(PhysicalType::Int64, LogicalKind::Integer);
    const EXACT8: MeanLength = MeanLength { len: 8.0, sample_size: 0 };

    #[test]
    fn column_estimate_takes_max_of_chunks() {
        let chunks = vec![
            int_chunk(0, storage_size(900.0, 8.0, 10_000, 0) as u64, 10_000, true),
            int_chunk(1, storage_size(1000.0, 8.0, 10_000, 0) as u64, 10_000, true),
            int_chunk(2, storage_size(950.0, 8.0, 10_000, 0) as u64, 10_000, true),
        ];
        let profile = ColumnProfile::new("c", INT64, Some(8), chunks).unwrap();
        let r = estimate_column_ndv_dict(&profile, EXACT8).unwrap();
        assert_eq!(r.ndv_dict, 1000.0);
        assert_eq!(r.per_chunk_ndv, vec![900.0, 1000.0, 950.0]);
        assert!(!r.plain_fallback);
        assert!(r.converged);
    }

    #[test]
    fn single_chunk_round_trip_column() {
        let profile = ColumnProfile::new("c", INT64, Some(8), vec![int_chunk(0, 1_830_000, 1_000_000, true)]).unwrap();
        let r = estimate_column_ndv_dict(&profile, EXACT8).unwrap();
        assert_eq!(r.ndv_dict, 10_000.0);
    }

    #[test]
    fn sorted_column_underestimates() {
        // 100,000 distinct values sorted across 10 chunks: each chunk sees 10,000.
        let chunks =
            (0..10).map(|i| int_chunk(i, storage_size(10_000.0, 8.0, 100_000, 0) as u64, 100_000, true)).collect();
        let profile = ColumnProfile::new("c", INT64, Some(8), chunks).unwrap();
        let r = estimate_column_ndv_dict(&profile, EXACT8).unwrap();
        assert_eq!(r.ndv_dict, 10_000.0);
    }

    #[test]
    fn no_dictionary_chunks() {
        let profile = ColumnProfile::new("c", INT64, Some(8), vec![int_chunk(0, 800, 100, false)]).unwrap();
        assert!(matches!(estimate_column_ndv_dict(&profile, EXACT8), Err(DictError::NoDictionaryChunks)));
    }

    #[test]
    fn plain_rows_dominating_flags_fallback() {
        let chunks = vec![
            int_chunk(0, storage_size(10.0, 8.0, 1000, 0) as u64, 1000, true),
            int_chunk(1, 8 * 3000, 3000, false),
        ];
        let profile = ColumnProfile::new("c", INT64, Some(8), chunks).unwrap();
        let r = estimate_column_ndv_dict(&profile, EXACT8).unwrap();
        assert!(r.plain_fallback);
        assert_eq!(r.ndv_dict, 10.0);
    }

    #[test]
    fn plain_sized_chunk_flags_fallback() {
        // One raw 32-byte value per row: the writer gave up on the dictionary.
        let ty = ColumnType::new(PhysicalType::FixedLenByteArray, LogicalKind::Binary);
        let mut chunk = int_chunk(0, 32 * 100_000, 100_000, true);
        chunk.physical_type = PhysicalType::FixedLenByteArray;
        let profile = ColumnProfile::new("c", ty, Some(32), vec![chunk]).unwrap();
        let r = estimate_column_ndv_dict(&profile, MeanLength { len: 32.0, sample_size: 0 }).unwrap();
        assert!(r.plain_fallback, "{r:?}");
    }

    #[test]
    fn plain_sized_narrow_chunk_is_not_detected() {
        // With 8-byte values the index bits absorb a fifth of the size, so a
        // plain-sized chunk inverts to ~0.8 N, below the detector's ratio.
        let profile = ColumnProfile::new("c", INT64, Some(8), vec![int_chunk(0, 8 * 10_000, 10_000, true)]).unwrap();
        let r = estimate_column_ndv_dict(&profile, EXACT8).unwrap();
        assert!(!r.plain_fallback);
        assert_eq!(r.ndv_dict, 7969.0);
    }

    #[test]
    fn undersized_chunks_are_skipped() {
        let chunks = vec![int_chunk(0, 2, 100, true), int_chunk(1, storage_size(40.0, 8.0, 100, 0) as u64, 100, true)];
        let profile = ColumnProfile::new("c", INT64, Some(8), chunks).unwrap();
        let r = estimate_column_ndv_dict(&profile, EXACT8).unwrap();
        assert_eq!(r.chunks_not_invertible, 1);
        assert_eq!(r.ndv_dict, 40.0);

        let profile = ColumnProfile::new("c", INT64, Some(8), vec![int_chunk(0, 2, 100, true)]).unwrap();
        assert!(matches!(estimate_column_ndv_dict(&profile, EXACT8), Err(DictError::NotInvertible { .. })));
    }
}
