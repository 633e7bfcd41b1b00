use divconv::arith::FactorSieve;
use divconv::asymptotic::*;
use divconv::convolution::s_ab_values_in;

#[test]
fn ratio_to_main_term_approaches_one() {
    let s = FactorSieve::new(10_000).unwrap();
    for (a, b) in [(1.0, 2.0), (2.0, 3.0), (1.5, 2.5)] {
        let exact: Vec<f64> = s_ab_values_in(a, b, &[1000, 10_000]).unwrap();
        let r1 = (exact[0] / main_term(a, b, 1000, &s).unwrap() - 1.0).abs();
        let r2 = (exact[1] / main_term(a, b, 10_000, &s).unwrap() - 1.0).abs();
        assert!(r2 < r1 && r2 < 1e-3, "({a},{b}) {r1} {r2}");
    }
}

#[test]
fn residues_scale_like_n_to_b_minus_m() {
    // |Res(−m)| ≤ C n^{b−m}, with one C per (a, b); the m = 1 sums converge
    // like d^{−1}, so the default tail tolerance is out of reach at d_max = 2000.
    let cfg = ApproxConfig {
        tail_tolerance: 1e-3,
        ..ApproxConfig::default()
    };
    for (a, b, m) in [(2.0, 7.0, 0u32), (2.0, 7.0, 1), (4.0, 9.0, 1)] {
        let ratios: Vec<f64> = [10u64, 60, 360, 1000]
            .iter()
            .map(|&n| residue_term(m, a, b, n, &cfg).unwrap().abs() / (n as f64).powf(b - m as f64))
            .collect();
        let c = ratios.iter().cloned().fold(0.0, f64::max);
        assert!(c > 0.0 && c < 10.0, "({a},{b},{m}) {ratios:?}");
    }
}

#[test]
fn odd_a_residues_match_closed_form() {
    let cfg = ApproxConfig::default();
    let s = FactorSieve::new(1000).unwrap();
    for a in [1.0, 3.0, 5.0] {
        let b = a + 2.5;
        for n in [10u64, 100] {
            let r0 = residue_term(0, a, b, n, &cfg).unwrap();
            let c0 = residue_closed_form_odd_a(0, a, b, n, &s).unwrap();
            assert!(((r0 - c0) / c0).abs() <= 1e-6);
            let r1 = residue_term(1, a, b, n, &cfg).unwrap();
            assert!(r1.abs() <= 1e-8 * (n as f64).powf(b - 1.0));
        }
    }
}

#[test]
fn wide_pair_expansion_json_fields() {
    let e = expand(3.0, 7.0, 100, &ApproxConfig::default()).unwrap();
    let sum: f64 = e.main + e.secondary + e.residues.iter().map(|r| r.1).sum::<f64>();
    assert_eq!(e.approx, sum);
    assert_eq!(e.secondary, 0.0);
    let exact: Vec<f64> = s_ab_values_in(3.0, 7.0, &[100]).unwrap();
    assert!(((exact[0] - e.approx) / exact[0]).abs() < 1e-8);
}
