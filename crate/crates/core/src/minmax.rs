//! NDV from the diversity of row-group minima and maxima.
//!
//! If row groups were uniform samples of the column, each group's minimum
//! would be a draw from the value population, and the number of distinct
//! minima over `n` groups follows the coupon-collector law
//!
//! ```text
//! E[m] = ndv * (1 - exp(-n / ndv))
//! ```
//!
//! Inverting that law for the observed `m` gives an NDV estimate; the same is
//! done for the maxima and the larger estimate is kept.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{ColumnProfile, StatValue};
use crate::numeric::{self, RootProblem};

/// Upper search bound for the inversion.
pub const MAX_NDV: f64 = 1e12;
/// Count subtracted from `m` when every group had a distinct extremum, where
/// the law has no finite solution.
pub const SATURATION_OFFSET: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MinMaxError {
    #[error("no row group carries min/max statistics")]
    NoStatistics,
    #[error("invalid coupon-collector observation: m = {m}, n = {n}")]
    InvalidObservation { m: f64, n: u64 },
    #[error(transparent)]
    Solver(#[from] numeric::SolveError),
}

/// Distinct row-group extrema of a column, compared on raw statistic bytes.
#[derive(Debug, Clone, PartialEq)]
pub struct DistinctExtrema {
    /// Row groups with both a min and a max.
    pub n_groups: usize,
    pub m_min: usize,
    pub m_max: usize,
    /// Union of the distinct minima and maxima.
    pub values: BTreeSet<StatValue>,
}

pub fn count_distinct_extrema(profile: &ColumnProfile) -> Result<DistinctExtrema, MinMaxError> {
    let mut mins = BTreeSet::new();
    let mut maxs = BTreeSet::new();
    let mut n_groups = 0;
    for (lo, hi) in profile.chunks.iter().filter_map(|c| c.range()) {
        n_groups += 1;
        mins.insert(lo);
        maxs.insert(hi);
    }
    if n_groups == 0 {
        return Err(MinMaxError::NoStatistics);
    }
    let (m_min, m_max) = (mins.len(), maxs.len());
    let values = mins.into_iter().chain(maxs).cloned().collect();
    Ok(DistinctExtrema { n_groups, m_min, m_max, values })
}

/// Expected distinct values seen in `draws` uniform draws from `ndv` values.
pub fn expected_distinct(ndv: f64, draws: f64) -> f64 {
    -ndv * (-draws / ndv).exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouponInversion {
    pub ndv: f64,
    pub saturated: bool,
    pub converged: bool,
    pub iterations: usize,
}

/// Solve `expected_distinct(ndv, n) = m` for `ndv`.
///
/// When `m = n` the law has no finite root; `m` is replaced by `n - 0.5`,
/// which lands near `n^2` and is flagged as saturated.
pub fn invert_coupon_collector(m: f64, n: u64) -> Result<CouponInversion, MinMaxError> {
    let nf = n as f64;
    if n == 0 || !(1.0..=nf).contains(&m) {
        return Err(MinMaxError::InvalidObservation { m, n });
    }
    let saturated = m >= nf;
    let target = if saturated { nf - SATURATION_OFFSET } else { m };
    let objective = |x: f64| expected_distinct(x, nf) - target;
    // At x = m the objective is <= 0 (can't see more distinct values than
    // exist), so a non-negative value there means m itself is the root.
    let lower = target.max(SATURATION_OFFSET);
    if objective(lower) >= 0.0 {
        return Ok(CouponInversion { ndv: lower.max(1.0), saturated, converged: true, iterations: 0 });
    }
    let derivative = |x: f64| {
        let r = nf / x;
        1.0 - (-r).exp() * (1.0 + r)
    };
    let problem = RootProblem::new(objective, derivative, lower, lower, MAX_NDV)?;
    let root = numeric::solve(&problem)?;
    Ok(CouponInversion { ndv: root.value.max(m), saturated, converged: root.converged, iterations: root.iterations })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxDiversityResult {
    pub n_groups: usize,
    pub m_min: usize,
    pub m_max: usize,
    /// Size of the union of distinct minima and maxima.
    pub distinct_extrema: usize,
    pub ndv_from_min: f64,
    pub ndv_from_max: f64,
    pub ndv_minmax: f64,
    /// Set when the retained side had a distinct extremum in every group.
    pub saturated: bool,
    pub converged: bool,
}

pub fn estimate_column_ndv_minmax(profile: &ColumnProfile) -> Result<MinMaxDiversityResult, MinMaxError> {
    estimate_from_extrema(&count_distinct_extrema(profile)?)
}

pub fn estimate_from_extrema(extrema: &DistinctExtrema) -> Result<MinMaxDiversityResult, MinMaxError> {
    let n = extrema.n_groups as u64;
    let from_min = invert_coupon_collector(extrema.m_min as f64, n)?;
    let from_max = invert_coupon_collector(extrema.m_max as f64, n)?;
    let kept = if from_min.ndv >= from_max.ndv { from_min } else { from_max };
    Ok(MinMaxDiversityResult {
        n_groups: extrema.n_groups,
        m_min: extrema.m_min,
        m_max: extrema.m_max,
        distinct_extrema: extrema.values.len(),
        ndv_from_min: from_min.ndv,
        ndv_from_max: from_max.ndv,
        ndv_minmax: kept.ndv,
        saturated: kept.saturated,
        converged: from_min.converged && from_max.converged,
    })
}
