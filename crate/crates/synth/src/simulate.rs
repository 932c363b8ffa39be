//! Model-world profiles: what a footer would say if every chunk were sized
//! exactly by the dictionary storage equation.

use ndv_scout_core::dict::storage_size;
use ndv_scout_core::ingest::{ColumnChunkMeta, ColumnProfile, ColumnType, LogicalKind, PhysicalType, StatValue};

use crate::generate::GeneratedColumn;
use crate::spec::{ColumnSpec, SpecError, ValueType};
use crate::truth::ColumnTruth;

pub fn column_type(value_type: ValueType) -> (ColumnType, Option<u32>) {
    match value_type {
        ValueType::Int64 { .. } => (ColumnType::new(PhysicalType::Int64, LogicalKind::Integer), Some(8)),
        ValueType::Double => (ColumnType::new(PhysicalType::Double, LogicalKind::Float), Some(8)),
        ValueType::String { .. } => (ColumnType::new(PhysicalType::ByteArray, LogicalKind::String), None),
    }
}

/// Generate `spec` in memory and build its model-world profile.
pub fn simulate_profile(spec: &ColumnSpec) -> Result<ColumnProfile, SpecError> {
    spec.validate()?;
    Ok(model_profile_from_truth(&spec.name, &column_truth(spec)?))
}

/// Ground truth for one column without writing a file.
pub fn column_truth(spec: &ColumnSpec) -> Result<ColumnTruth, SpecError> {
    spec.validate()?;
    Ok(GeneratedColumn::new(spec).truth())
}

/// Profile whose chunk sizes follow the storage equation exactly, with the
/// true per-group distinct counts and dictionary entry lengths.
pub fn model_profile_from_truth(name: &str, truth: &ColumnTruth) -> ColumnProfile {
    let (ty, fixed_width) = column_type(truth.value_type);
    let chunks = truth
        .per_group
        .iter()
        .enumerate()
        .map(|(i, g)| ColumnChunkMeta {
            row_group_index: i,
            uncompressed_size: if g.distinct == 0 {
                0
            } else {
                storage_size(g.distinct as f64, g.dict_mean_len, g.rows, g.nulls).round() as u64
            },
            value_count: g.rows,
            null_count: Some(g.nulls),
            min_value: g.min.as_ref().map(|v| StatValue(v.to_stat_bytes())),
            max_value: g.max.as_ref().map(|v| StatValue(v.to_stat_bytes())),
            dictionary_encoded: true,
            physical_type: ty.physical,
        })
        .collect();
    ColumnProfile::new(name, ty, fixed_width, chunks).expect("truth groups are ordered and consistent")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::Layout;
    use ndv_scout_core::distribution::{analyze, DistributionClass};

    fn spec(layout: Layout, ndv: u64, rows: u64, row_group_rows: u64) -> ColumnSpec {
        ColumnSpec {
            name: "c".into(),
            value_type: ValueType::Int64 { base: 0, stride: 1 },
            ndv_true: ndv,
            rows,
            null_fraction: 0.0,
            layout,
            row_group_rows,
            seed: 11,
        }
    }

    #[test]
    fn single_chunk_size_matches_equation() {
        let p = simulate_profile(&spec(Layout::Sorted, 10_000, 1_000_000, 1_000_000)).unwrap();
        assert_eq!(p.chunks.len(), 1);
        assert_eq!(p.chunks[0].uncompressed_size, 1_830_000);
    }

    #[test]
    fn sorted_ranges_are_disjoint() {
        let p = simulate_profile(&spec(Layout::Sorted, 1000, 1000, 100)).unwrap();
        let r = analyze(&p);
        assert_eq!(r.overlap_ratio, 0.0);
        assert_eq!(r.class, DistributionClass::Sorted);
    }

    #[test]
    fn last_group_may_be_short() {
        let p = simulate_profile(&spec(Layout::Uniform, 10, 1050, 100)).unwrap();
        assert_eq!(p.chunks.len(), 11);
        assert_eq!(p.chunks[10].value_count, 50);
    }
}
