//! Algebraic properties of certainty-factor combination.

use feaso_core::cf::{combine_parallel, CertaintyFactor};
use proptest::prelude::*;

fn cf() -> impl Strategy<Value = f64> {
    -1.0f64..=1.0
}

fn positive() -> impl Strategy<Value = f64> {
    0.0f64..=1.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn stays_in_range(a in cf(), b in cf()) {
        let c = combine_parallel(a, b);
        prop_assert!((-1.0..=1.0).contains(&c), "{a} {b} -> {c}");
    }

    #[test]
    fn commutative(a in cf(), b in cf()) {
        prop_assert!((combine_parallel(a, b) - combine_parallel(b, a)).abs() < 1e-12);
    }

    #[test]
    fn associative_on_same_sign(a in positive(), b in positive(), c in positive(), neg in any::<bool>()) {
        let s = if neg { -1.0 } else { 1.0 };
        let (a, b, c) = (a * s, b * s, c * s);
        let l = combine_parallel(combine_parallel(a, b), c);
        let r = combine_parallel(a, combine_parallel(b, c));
        prop_assert!((l - r).abs() < 1e-12, "{l} vs {r}");
    }

    #[test]
    fn zero_is_identity(a in cf()) {
        prop_assert_eq!(combine_parallel(a, 0.0), a);
        prop_assert_eq!(combine_parallel(0.0, a), a);
    }

    #[test]
    fn certainty_absorbs_confirmation(x in positive()) {
        prop_assert_eq!(combine_parallel(1.0, x), 1.0);
    }

    #[test]
    fn f32_agrees_with_f64(a in -1.0f32..=1.0, b in -1.0f32..=1.0) {
        let narrow = combine_parallel(a, b) as f64;
        let wide = combine_parallel(a as f64, b as f64);
        prop_assert!((narrow - wide).abs() < 1e-5);
    }

    #[test]
    fn constructor_rejects_out_of_range(v in prop_oneof![-10.0f64..-1.0001, 1.0001f64..10.0]) {
        prop_assert!(CertaintyFactor::new(v).is_err());
    }
}

#[test]
fn documented_values() {
    assert!((combine_parallel(0.6f64, 0.5) - 0.8).abs() < 1e-12);
    assert!((combine_parallel(0.8f64, -0.4) - 0.6667).abs() < 1e-4);
    assert!((combine_parallel(0.8f64, -0.4) - 0.4 / 0.6).abs() < 1e-9);
}
