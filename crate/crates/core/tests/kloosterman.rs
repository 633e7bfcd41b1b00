use divconv::arith::gcd;
use divconv::kloosterman::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fast_enumeration_matches_scan(m in -20i64..20, k in -20i64..20, n in 0u64..60, d in 1u64..80) {
        let q = KloostermanQuery::new(m, k, n, d);
        prop_assert!((twisted_sum_direct(&q) - twisted_sum_brute(&q)).abs() < 1e-8);
    }

    #[test]
    fn decomposition_matches_direct(m in 1i64..11, k in 1i64..11, n in 1u64..11, d in 1u64..301) {
        let q = KloostermanQuery::new(m, k, n, d);
        prop_assert!((twisted_sum_direct(&q) - twisted_sum_decomposed(&q)).abs() <= 1e-6);
    }

    #[test]
    fn invariant_under_unit_change(a in 1i64..30, b in 1i64..30, q in 2u64..200, c in 1u64..200) {
        // K(ac, b c̄; q) = K(a, b; q) for c coprime to q
        prop_assume!(gcd(c % q, q) == 1);
        let cbar = divconv::arith::mod_inverse(c % q, q).unwrap() as i64;
        let lhs = kloosterman_sum(a * c as i64, b * cbar, q);
        prop_assert!((lhs - kloosterman_sum(a, b, q)).abs() < 1e-8);
    }

    #[test]
    fn weil_bound(aa in 1i64..4, bb in 1i64..4, q in 1u64..501) {
        prop_assert!(weil_check(aa, bb, q).ok);
    }
}

#[test]
fn ramanujan_sum_special_case() {
    // K(a, 0; q) is the Ramanujan sum c_q(a); c_p(1) = −1 for prime p
    for p in [2u64, 3, 5, 7, 11, 101] {
        assert!((kloosterman_sum(1, 0, p) + 1.0).abs() < 1e-9);
        assert!((kloosterman_sum(0, 0, p) - (p - 1) as f64).abs() < 1e-9);
    }
}

#[test]
fn normalized_sizes_stay_bounded() {
    let (sup, d) = twisted_bound_sweep(120, 4);
    assert!(sup.is_finite() && sup > 0.0 && d >= 1);
    assert!(sup < 60.0, "{sup} at {d}");
}
