use cwac_core::bounds::{BoundsEngine, Side, DEFAULT_BUDGET};
use cwac_core::words::CodeParams;
use proptest::prelude::*;
use std::sync::OnceLock;

fn engine() -> &'static BoundsEngine {
    static E: OnceLock<BoundsEngine> = OnceLock::new();
    E.get_or_init(BoundsEngine::new)
}

fn params() -> impl Strategy<Value = CodeParams> {
    (2..=12u64, 1..=5u64, 1..=6u64)
        .prop_filter("w <= m", |(m, _, w)| w <= m)
        .prop_flat_map(|(m, n, w)| (1..=n * w.min(m - w).max(1) + 1).prop_map(move |d| CodeParams { m, n, w, d }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn intervals_are_ordered_and_replay(p in params()) {
        let r = engine().best_bounds(p, 2);
        prop_assert!(r.lower_value() <= r.upper_value(), "{}: {} > {}", p, r.lower_value(), r.upper_value());
        prop_assert!(r.replay(engine().counts()).is_ok());
    }

    #[test]
    fn monotone_in_distance(p in params()) {
        prop_assume!(p.d > 1);
        let q = CodeParams { d: p.d - 1, ..p };
        for side in [Side::Lower, Side::Upper] {
            let a = engine().bound(side, p, 2);
            let b = engine().bound(side, q, 2);
            prop_assert!(a.value <= b.value, "{:?} {}: {} vs {} at {}", side, p, a.value, b.value, q);
        }
    }

    #[test]
    fn complement_symmetry(p in params()) {
        let q = CodeParams { w: p.m - p.w, ..p };
        prop_assume!(q.w >= 1);
        let a = engine().best_bounds(p, 2);
        let b = engine().best_bounds(q, 2);
        prop_assert_eq!(a.lower_value(), b.lower_value());
        prop_assert_eq!(a.upper_value(), b.upper_value());
    }
}

#[test]
fn json_has_required_keys() {
    let r = engine().best_bounds(CodeParams { m: 4, n: 1, w: 2, d: 2 }, DEFAULT_BUDGET);
    let v = r.to_json();
    for key in ["m", "n", "w", "d", "lower", "upper", "rule", "children"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["lower"], "2");
    assert_eq!(v["upper"], "2");
}

#[test]
fn larger_instance_is_fast_and_consistent() {
    let p = CodeParams { m: 10, n: 4, w: 3, d: 5 };
    let r = engine().best_bounds(p, DEFAULT_BUDGET);
    assert!(r.lower_value() <= r.upper_value());
    r.replay(engine().counts()).unwrap();
}
