//! Ordering keys preserve each type's statistic order.

use ndv_scout_core::ingest::{
    compare_stat_values, interpret_ordering_key, ColumnType, LogicalKind, PhysicalType, StatValue,
};
use proptest::prelude::*;
use std::cmp::Ordering;

const INT64: ColumnType = ColumnType::new(PhysicalType::Int64, LogicalKind::Integer);
const INT32: ColumnType = ColumnType::new(PhysicalType::Int32, LogicalKind::Integer);
const DOUBLE: ColumnType = ColumnType::new(PhysicalType::Double, LogicalKind::Float);
const STRING: ColumnType = ColumnType::new(PhysicalType::ByteArray, LogicalKind::String);

proptest! {
    // Keys are f64, so large integers and long strings can collide; the
    // mapping is order-preserving but only weakly.
    #[test]
    fn int64_keys_are_monotone(a: i64, b: i64) {
        let (lo, hi) = (a.min(b), a.max(b));
        let klo = interpret_ordering_key(&lo.to_le_bytes(), INT64).unwrap();
        let khi = interpret_ordering_key(&hi.to_le_bytes(), INT64).unwrap();
        prop_assert!(klo <= khi);
    }

    #[test]
    fn small_int_keys_are_exact(a in -(1i64 << 52)..(1i64 << 52)) {
        prop_assert_eq!(interpret_ordering_key(&a.to_le_bytes(), INT64).unwrap(), a as f64);
    }

    #[test]
    fn int32_unsigned_keys_are_monotone(a: u32, b: u32) {
        let ty = INT32.unsigned();
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(
            interpret_ordering_key(&lo.to_le_bytes(), ty).unwrap()
                <= interpret_ordering_key(&hi.to_le_bytes(), ty).unwrap()
        );
    }

    #[test]
    fn double_keys_are_identity(a in -1e300f64..1e300) {
        prop_assert_eq!(interpret_ordering_key(&a.to_le_bytes(), DOUBLE).unwrap(), a);
    }

    #[test]
    fn string_keys_are_monotone(a in prop::collection::vec(any::<u8>(), 0..24), b in prop::collection::vec(any::<u8>(), 0..24)) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let klo = interpret_ordering_key(&lo, STRING).unwrap();
        let khi = interpret_ordering_key(&hi, STRING).unwrap();
        prop_assert!(klo <= khi);
        prop_assert_eq!(
            compare_stat_values(&StatValue(lo.clone()), &StatValue(hi.clone()), STRING),
            Some(lo.cmp(&hi))
        );
    }

    #[test]
    fn int_comparison_is_exact(a: i64, b: i64) {
        let ord = compare_stat_values(&StatValue(a.to_le_bytes().to_vec()), &StatValue(b.to_le_bytes().to_vec()), INT64);
        prop_assert_eq!(ord, Some(a.cmp(&b)));
    }
}

#[test]
fn long_strings_sharing_a_prefix_compare_exactly() {
    let a = StatValue(b"prefix__aaaa".to_vec());
    let b = StatValue(b"prefix__aaab".to_vec());
    assert_eq!(
        interpret_ordering_key(a.as_bytes(), STRING).unwrap(),
        interpret_ordering_key(b.as_bytes(), STRING).unwrap()
    );
    assert_eq!(compare_stat_values(&a, &b, STRING), Some(Ordering::Less));
}

#[test]
fn int96_is_uninterpretable() {
    let ty = ColumnType::new(PhysicalType::Int96, LogicalKind::Timestamp);
    assert!(interpret_ordering_key(&[0u8; 12], ty).is_err());
}
