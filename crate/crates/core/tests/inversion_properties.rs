//! Round-trip and monotonicity properties of both inversions.

use ndv_scout_core::dict::{invert_storage_size, storage_size};
use ndv_scout_core::minmax::{expected_distinct, invert_coupon_collector};
use proptest::prelude::*;

proptest! {
    // Integer ndv maps to a strictly increasing size, so the inversion must
    // recover it exactly.
    #[test]
    fn dict_round_trip_is_exact(
        non_null in 1u64..2_000_000,
        nulls in 0u64..10_000,
        frac in 0.0f64..=1.0,
        len in prop::sample::select(vec![1.0, 2.0, 4.0, 8.0, 12.0, 16.0, 33.5, 100.0]),
    ) {
        let values = non_null + nulls;
        let ndv = (1.0 + frac * (non_null - 1) as f64).round();
        let size = storage_size(ndv, len, values, nulls);
        let inv = invert_storage_size(size, values, nulls, len).unwrap();
        prop_assert_eq!(inv.ndv, ndv);
        prop_assert!(inv.iterations <= 20, "{} iterations", inv.iterations);
    }

    #[test]
    fn dict_inversion_is_monotone_in_size(
        values in 2u64..500_000,
        len in 1.0f64..64.0,
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
    ) {
        let lo_size = storage_size(1.0, len, values, 0);
        let hi_size = storage_size(values as f64, len, values, 0);
        let (s1, s2) = if a <= b { (a, b) } else { (b, a) };
        let s1 = lo_size + s1 * (hi_size - lo_size);
        let s2 = lo_size + s2 * (hi_size - lo_size);
        let n1 = invert_storage_size(s1, values, 0, len).unwrap().ndv;
        let n2 = invert_storage_size(s2, values, 0, len).unwrap().ndv;
        prop_assert!(n1 <= n2, "S {} -> {}, S {} -> {}", s1, n1, s2, n2);
        prop_assert!((1.0..=values as f64).contains(&n1));
    }

    #[test]
    fn coupon_inversion_is_monotone_and_at_least_m(n in 2u64..5000, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let m1 = 1.0 + lo * (n - 1) as f64;
        let m2 = 1.0 + hi * (n - 1) as f64;
        let r1 = invert_coupon_collector(m1, n).unwrap();
        let r2 = invert_coupon_collector(m2, n).unwrap();
        prop_assert!(r1.ndv >= m1 && r2.ndv >= m2);
        prop_assert!(r1.ndv <= r2.ndv * (1.0 + 1e-9), "{} -> {}, {} -> {}", m1, r1.ndv, m2, r2.ndv);
        prop_assert_eq!(r1.saturated, m1 == n as f64);
    }

    #[test]
    fn expected_distinct_is_increasing(ndv in 1.0f64..1e7, draws in 0.0f64..1e5, d_ndv in 0.0f64..1e3, d_draws in 0.0f64..1e3) {
        let base = expected_distinct(ndv, draws);
        prop_assert!(expected_distinct(ndv + d_ndv, draws) >= base - 1e-9 * base.max(1.0));
        prop_assert!(expected_distinct(ndv, draws + d_draws) >= base - 1e-9 * base.max(1.0));
        prop_assert!(base <= ndv.min(draws) + 1e-9);
    }
}

#[test]
fn coupon_round_trip_grid() {
    for ndv in [10.0, 1e2, 1e3, 1e4, 1e5, 1e6] {
        for n in [10u64, 100, 1000, 10_000] {
            let m = expected_distinct(ndv, n as f64);
            if m >= n as f64 - 0.5 || m < 1.0 {
                continue;
            }
            let inv = invert_coupon_collector(m, n).unwrap();
            let rel = (inv.ndv - ndv).abs() / ndv;
            assert!(rel <= 0.01, "ndv {ndv} n {n}: {}", inv.ndv);
        }
    }
}

#[test]
fn saturation_flag_exactly_at_m_equals_n() {
    for n in [1u64, 2, 10, 50, 1000] {
        assert!(invert_coupon_collector(n as f64, n).unwrap().saturated);
        if n > 1 {
            assert!(!invert_coupon_collector(n as f64 - 1.0, n).unwrap().saturated);
        }
    }
}
