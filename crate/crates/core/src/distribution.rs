//! Physical layout classification from row-group range geometry.
//!
//! Two metrics are computed over the row groups' `[min, max]` ranges mapped to
//! ordering keys: how much consecutive ranges overlap relative to the total
//! span, and how consistently the range midpoints move in one direction.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{interpret_ordering_key, ColumnProfile};

pub const SORTED_MAX_OVERLAP: f64 = 0.1;
pub const SORTED_MIN_MONOTONICITY: f64 = 0.9;
pub const PSEUDO_SORTED_MAX_OVERLAP: f64 = 0.3;
pub const PSEUDO_SORTED_MIN_MONOTONICITY: f64 = 0.7;
pub const WELL_SPREAD_MIN_OVERLAP: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionClass {
    Sorted,
    PseudoSorted,
    WellSpread,
    Mixed,
}

impl DistributionClass {
    /// Layouts where each batch sees its own slice of the value domain.
    pub fn is_ordered(self) -> bool {
        matches!(self, DistributionClass::Sorted | DistributionClass::PseudoSorted)
    }
}

impl fmt::Display for DistributionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistributionClass::Sorted => "sorted",
            DistributionClass::PseudoSorted => "pseudo_sorted",
            DistributionClass::WellSpread => "well_spread",
            DistributionClass::Mixed => "mixed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistributionError {
    #[error("need at least {needed} ranges, got {got}")]
    TooFewRanges { needed: usize, got: usize },
    #[error("range {index} has min > max or a non-finite key")]
    InvalidRange { index: usize },
}

fn check(ranges: &[(f64, f64)], needed: usize) -> Result<(), DistributionError> {
    if ranges.len() < needed {
        return Err(DistributionError::TooFewRanges { needed, got: ranges.len() });
    }
    match ranges.iter().position(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
        Some(index) => Err(DistributionError::InvalidRange { index }),
        None => Ok(()),
    }
}

/// Sum of consecutive pairwise overlaps divided by the global span.
///
/// The ratio is not clamped: `n` identical ranges give `n - 1`. A zero span
/// (every key equal) gives 1.0.
pub fn overlap_ratio(ranges: &[(f64, f64)]) -> Result<f64, DistributionError> {
    check(ranges, 2)?;
    let lo = ranges.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let hi = ranges.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    if span <= 0.0 {
        return Ok(1.0);
    }
    let overlap: f64 = ranges.windows(2).map(|w| (w[0].1.min(w[1].1) - w[0].0.max(w[1].0)).max(0.0)).sum();
    Ok(overlap / span)
}

/// `1 - sign_changes / (n - 2)` over the midpoint deltas.
///
/// Zero deltas carry the previous sign, so plateaus never count as a change.
pub fn monotonicity(ranges: &[(f64, f64)]) -> Result<f64, DistributionError> {
    check(ranges, 3)?;
    let mids: Vec<f64> = ranges.iter().map(|(lo, hi)| lo / 2.0 + hi / 2.0).collect();
    let mut sign = 0.0;
    let mut changes = 0usize;
    for w in mids.windows(2) {
        let delta = w[1] - w[0];
        if delta == 0.0 {
            continue;
        }
        let s = delta.signum();
        if sign != 0.0 && s != sign {
            changes += 1;
        }
        sign = s;
    }
    Ok(1.0 - changes as f64 / (ranges.len() - 2) as f64)
}

/// Threshold rules, checked in order with strict inequalities.
pub fn classify(overlap_ratio: f64, monotonicity: f64) -> DistributionClass {
    if overlap_ratio < SORTED_MAX_OVERLAP && monotonicity > SORTED_MIN_MONOTONICITY {
        DistributionClass::Sorted
    } else if overlap_ratio < PSEUDO_SORTED_MAX_OVERLAP && monotonicity > PSEUDO_SORTED_MIN_MONOTONICITY {
        DistributionClass::PseudoSorted
    } else if overlap_ratio > WELL_SPREAD_MIN_OVERLAP {
        DistributionClass::WellSpread
    } else {
        DistributionClass::Mixed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    /// Raw ratio; may exceed 1 when many consecutive ranges overlap.
    pub overlap_ratio: f64,
    pub monotonicity: f64,
    pub class: DistributionClass,
    pub n_ranges: usize,
    pub analyzable: bool,
    /// False with exactly two ranges, where monotonicity is taken as 1.0.
    pub monotonicity_defined: bool,
    /// Ranges skipped because a key could not be interpreted.
    pub uninterpretable_ranges: usize,
}

impl DistributionReport {
    pub fn unanalyzable(n_ranges: usize, uninterpretable_ranges: usize) -> Self {
        Self {
            overlap_ratio: 0.0,
            monotonicity: 0.0,
            class: DistributionClass::Mixed,
            n_ranges,
            analyzable: false,
            monotonicity_defined: false,
            uninterpretable_ranges,
        }
    }
}

/// Ordering-key ranges of the chunks that carry statistics.
pub fn key_ranges(profile: &ColumnProfile) -> (Vec<(f64, f64)>, usize) {
    let ty = profile.column_type;
    let mut ranges = Vec::new();
    let mut bad = 0;
    for (lo, hi) in profile.chunks.iter().filter_map(|c| c.range()) {
        match (interpret_ordering_key(lo.as_bytes(), ty), interpret_ordering_key(hi.as_bytes(), ty)) {
            (Ok(a), Ok(b)) if a <= b => ranges.push((a, b)),
            _ => bad += 1,
        }
    }
    (ranges, bad)
}

/// Classify a column. Any uninterpretable range makes the column
/// unanalyzable, since dropping it would distort both metrics.
pub fn analyze(profile: &ColumnProfile) -> DistributionReport {
    let (ranges, bad) = key_ranges(profile);
    if bad > 0 {
        return DistributionReport::unanalyzable(ranges.len() + bad, bad);
    }
    analyze_ranges(&ranges)
}

pub fn analyze_ranges(ranges: &[(f64, f64)]) -> DistributionReport {
    let Ok(overlap) = overlap_ratio(ranges) else {
        return DistributionReport::unanalyzable(ranges.len(), 0);
    };
    let (mono, defined) = match monotonicity(ranges) {
        Ok(m) => (m, true),
        Err(_) => (1.0, false),
    };
    let class = if defined { classify(overlap, mono) } else { classify_by_overlap(overlap) };
    DistributionReport {
        overlap_ratio: overlap,
        monotonicity: mono,
        class,
        n_ranges: ranges.len(),
        analyzable: true,
        monotonicity_defined: defined,
        uninterpretable_ranges: 0,
    }
}

/// Two ranges carry no direction evidence; only the sorted/spread split on
/// overlap is meaningful.
fn classify_by_overlap(overlap: f64) -> DistributionClass {
    if overlap < SORTED_MAX_OVERLAP {
        DistributionClass::Sorted
    } else if overlap < PSEUDO_SORTED_MAX_OVERLAP {
        DistributionClass::PseudoSorted
    } else if overlap > WELL_SPREAD_MIN_OVERLAP {
        DistributionClass::WellSpread
    } else {
        DistributionClass::Mixed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use DistributionClass::*;

    fn points(mids: &[f64]) -> Vec<(f64, f64)> {
        mids.iter().map(|m| (*m, *m)).collect()
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(overlap_ratio(&[(0.0, 10.0), (0.0, 10.0)]).unwrap(), 1.0);
        assert_eq!(overlap_ratio(&[(0.0, 10.0), (20.0, 30.0), (40.0, 50.0)]).unwrap(), 0.0);
        assert!((overlap_ratio(&[(0.0, 10.0), (5.0, 15.0)]).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_is_raw() {
        let same = vec![(0.0, 10.0); 5];
        assert_eq!(overlap_ratio(&same).unwrap(), 4.0);
        assert_eq!(analyze_ranges(&same).class, WellSpread);
    }

    #[test]
    fn overlap_zero_span() {
        assert_eq!(overlap_ratio(&[(3.0, 3.0), (3.0, 3.0), (3.0, 3.0)]).unwrap(), 1.0);
        assert_eq!(analyze_ranges(&[(3.0, 3.0), (3.0, 3.0), (3.0, 3.0)]).class, WellSpread);
    }

    #[test]
    fn touching_ranges_do_not_overlap() {
        assert_eq!(overlap_ratio(&[(0.0, 10.0), (10.0, 20.0)]).unwrap(), 0.0);
    }

    #[test]
    fn monotonicity_examples() {
        assert_eq!(monotonicity(&points(&[1.0, 2.0, 3.0, 4.0])).unwrap(), 1.0);
        assert_eq!(monotonicity(&points(&[1.0, 3.0, 2.0, 4.0])).unwrap(), 0.0);
        assert_eq!(monotonicity(&points(&[5.0, 5.0, 5.0])).unwrap(), 1.0);
        assert_eq!(monotonicity(&points(&[4.0, 3.0, 2.0, 1.0])).unwrap(), 1.0);
    }

    #[test]
    fn plateaus_inherit_sign() {
        assert_eq!(monotonicity(&points(&[1.0, 2.0, 2.0, 2.0, 3.0])).unwrap(), 1.0);
        // +, 0, - : one change across the plateau.
        assert!((monotonicity(&points(&[1.0, 2.0, 2.0, 1.0])).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn too_few_ranges() {
        assert!(overlap_ratio(&[(0.0, 1.0)]).is_err());
        assert!(monotonicity(&[(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(overlap_ratio(&[(2.0, 1.0), (0.0, 1.0)]).is_err());
        let r = analyze_ranges(&[(0.0, 1.0)]);
        assert!(!r.analyzable);
        assert_eq!(r.class, Mixed);
    }

    #[test]
    fn two_ranges_use_overlap_only() {
        let r = analyze_ranges(&[(0.0, 10.0), (20.0, 30.0)]);
        assert!(r.analyzable && !r.monotonicity_defined);
        assert_eq!(r.monotonicity, 1.0);
        assert_eq!(r.class, Sorted);
        assert_eq!(analyze_ranges(&[(0.0, 10.0), (0.0, 10.0)]).class, WellSpread);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(0.05, 0.95), Sorted);
        assert_eq!(classify(0.8, 0.2), WellSpread);
        assert_eq!(classify(0.5, 0.5), Mixed);
        assert_eq!(classify(0.2, 0.8), PseudoSorted);
    }

    #[test]
    fn classify_boundaries_fall_through() {
        assert_eq!(classify(0.1, 0.95), PseudoSorted);
        assert_eq!(classify(0.05, 0.9), PseudoSorted);
        assert_eq!(classify(0.3, 0.95), Mixed);
        assert_eq!(classify(0.2, 0.7), Mixed);
        assert_eq!(classify(0.7, 0.0), Mixed);
        assert_eq!(classify(0.7000001, 0.0), WellSpread);
    }
}
