//! Kloosterman sums `K(a, b; q)` and the twisted sums
//! `S_n(m, k; d) = Σ_{e1 e2 ≡ n (mod d)} e((m e1 + k e2)/d)`.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::arith::{gcd, mod_inverse};
use crate::sum::Neumaier;

/// Parameters of a twisted sum; `m` and `k` are read modulo `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KloostermanQuery {
    pub m: i64,
    pub k: i64,
    pub n: u64,
    pub d: u64,
}

impl KloostermanQuery {
    pub fn new(m: i64, k: i64, n: u64, d: u64) -> Self {
        assert!(d >= 1, "modulus must be positive");
        KloostermanQuery { m, k, n, d }
    }
}

/// Largest tolerated imaginary residue in a sum that must be real.
pub const IMAG_TOLERANCE: f64 = 1e-9;

fn reduce(v: i64, q: u64) -> u64 {
    v.rem_euclid(q as i64) as u64
}

/// `(x y + z) mod q`, staying in `u64` when the product cannot overflow.
fn mul_add_mod(x: u64, y: u64, z: u64, q: u64) -> u64 {
    if q <= u32::MAX as u64 {
        (x * y + z) % q
    } else {
        ((x as u128 * y as u128 + z as u128) % q as u128) as u64
    }
}

/// Accumulates `e(r/q)` for integer residues `r`.
///
/// Residues are counted exactly and each class is evaluated once.
struct PhaseSum {
    q: u64,
    counts: Vec<u64>,
}

impl PhaseSum {
    fn new(q: u64) -> Self {
        PhaseSum {
            q,
            counts: vec![0; q as usize],
        }
    }

    fn push(&mut self, r: u64) {
        self.counts[(r % self.q) as usize] += 1;
    }

    fn real(&self) -> f64 {
        let (mut re, mut im) = (Neumaier::new(), Neumaier::new());
        for (r, &c) in self.counts.iter().enumerate() {
            if c != 0 {
                let (s, co) = (TAU * r as f64 / self.q as f64).sin_cos();
                re.add(c as f64 * co);
                im.add(c as f64 * s);
            }
        }
        let im = im.value();
        assert!(
            im.abs() < IMAG_TOLERANCE,
            "imaginary residue {im:e} in a real exponential sum mod {}",
            self.q
        );
        re.value()
    }
}

/// `K(aa, bb; q) = Σ_{x ∈ (Z/q)^*} e((aa x + bb x̄)/q)`.
pub fn kloosterman_sum(aa: i64, bb: i64, q: u64) -> f64 {
    assert!(q >= 1, "modulus must be positive");
    let (a, b) = (reduce(aa, q), reduce(bb, q));
    let mut acc = PhaseSum::new(q);
    for x in 0..q {
        if let Some(y) = mod_inverse(x, q) {
            acc.push(mul_add_mod(b, y, mul_add_mod(a, x, 0, q), q));
        }
    }
    acc.real()
}

/// Twisted sum by enumerating every solution pair of `e1 e2 ≡ n (mod d)`.
///
/// For each `e1`, with `g = gcd(e1, d)`, the congruence is solvable iff `g | n`,
/// and then has exactly `g` solutions `e2 = e0 + t d/g`.
pub fn twisted_sum_direct(q: &KloostermanQuery) -> f64 {
    let d = q.d;
    let m = reduce(q.m, d);
    let k = reduce(q.k, d);
    let n = q.n % d;
    let mut acc = PhaseSum::new(d);
    for e1 in 0..d {
        let g = gcd(e1, d);
        if n % g != 0 {
            continue;
        }
        let dg = d / g;
        let inv = mod_inverse((e1 / g) % dg, dg).expect("coprime after division");
        let e0 = mul_add_mod(n / g, inv, 0, dg);
        let me1 = mul_add_mod(m, e1, 0, d);
        for t in 0..g {
            acc.push(mul_add_mod(k, e0 + t * dg, me1, d));
        }
    }
    acc.real()
}

/// Twisted sum by the O(d²) scan over all pairs; reference for [`twisted_sum_direct`].
pub fn twisted_sum_brute(q: &KloostermanQuery) -> f64 {
    let d = q.d;
    let m = reduce(q.m, d) as u128;
    let k = reduce(q.k, d) as u128;
    let n = q.n % d;
    let mut acc = PhaseSum::new(d);
    for e1 in 0..d {
        for e2 in 0..d {
            if (e1 as u128 * e2 as u128) % d as u128 == n as u128 {
                let r = (m * e1 as u128 + k * e2 as u128) % d as u128;
                acc.push(r as u64);
            }
        }
    }
    acc.real()
}

/// `Σ_{f | (d, n, k)} f · K(m, k n / f², d / f)`, with `k` reduced mod `d` first.
pub fn twisted_sum_decomposed(q: &KloostermanQuery) -> f64 {
    let d = q.d;
    let k = reduce(q.k, d);
    let g = gcd(gcd(d, q.n), k);
    let mut acc = Neumaier::new();
    for f in 1..=g {
        if g % f != 0 {
            continue;
        }
        let df = d / f;
        let kn = mul_add_mod(k / f, (q.n / f) % df, 0, df) as i64;
        acc.add(f as f64 * kloosterman_sum(q.m, kn, df));
    }
    acc.value()
}

/// Outcome of a Weil bound check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeilCheck {
    pub value: f64,
    pub bound: f64,
    pub ok: bool,
}

fn tau(mut q: u64) -> u64 {
    let mut count = 1;
    let mut p = 2;
    while p * p <= q {
        let mut e = 0;
        while q % p == 0 {
            q /= p;
            e += 1;
        }
        count *= e + 1;
        p += 1;
    }
    if q > 1 {
        count *= 2;
    }
    count
}

/// `|K(aa, bb; q)| ≤ τ(q) √q gcd(aa, bb, q)^{1/2}`.
pub fn weil_check(aa: i64, bb: i64, q: u64) -> WeilCheck {
    let value = kloosterman_sum(aa, bb, q);
    let g = gcd(gcd(reduce(aa, q), reduce(bb, q)), q).max(1);
    let bound = tau(q) as f64 * (q as f64).sqrt() * (g as f64).sqrt();
    WeilCheck {
        value,
        bound,
        ok: value.abs() <= bound + 1e-9,
    }
}

/// Normalized size `|S_n(m,k;d)| / (d^{0.6} (d,k)^{0.5} (d,m)^{0.5})`.
pub fn normalized_twisted(q: &KloostermanQuery) -> f64 {
    let d = q.d;
    let s = twisted_sum_direct(q).abs();
    let gk = gcd(reduce(q.k, d), d) as f64;
    let gm = gcd(reduce(q.m, d), d) as f64;
    s / ((d as f64).powf(0.6) * gk.sqrt() * gm.sqrt())
}

/// Largest normalized twisted sum over `d ≤ d_max` and `m, k, n` in `1..=param_max`.
///
/// Returns `(sup, d_at_sup)`.
pub fn twisted_bound_sweep(d_max: u64, param_max: i64) -> (f64, u64) {
    (1..=d_max)
        .into_par_iter()
        .map(|d| {
            let mut best = 0.0f64;
            for m in 1..=param_max {
                for k in 1..=param_max {
                    for n in 1..=param_max as u64 {
                        best = best.max(normalized_twisted(&KloostermanQuery::new(m, k, n, d)));
                    }
                }
            }
            (best, d)
        })
        .reduce(|| (0.0, 0), |x, y| if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x })
}

/// Worst case of a sweep comparing two evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSummary {
    pub cases: u64,
    pub max_value: f64,
    pub violations: u64,
}

/// `|direct − decomposed|` over `d ≤ d_max` and `m, k, n` in `1..=param_max`.
pub fn decomposition_sweep(d_max: u64, param_max: i64, tol: f64) -> SweepSummary {
    let per_d: Vec<(f64, u64)> = (1..=d_max)
        .into_par_iter()
        .map(|d| {
            let mut worst = 0.0f64;
            let mut bad = 0;
            for m in 1..=param_max {
                for k in 1..=param_max {
                    for n in 1..=param_max as u64 {
                        let q = KloostermanQuery::new(m, k, n, d);
                        let gap = (twisted_sum_direct(&q) - twisted_sum_decomposed(&q)).abs();
                        worst = worst.max(gap);
                        bad += (gap > tol) as u64;
                    }
                }
            }
            (worst, bad)
        })
        .collect();
    let p = param_max.max(0) as u64;
    SweepSummary {
        cases: d_max * p * p * p,
        max_value: per_d.iter().map(|x| x.0).fold(0.0, f64::max),
        violations: per_d.iter().map(|x| x.1).sum(),
    }
}

/// `|K(aa, bb; q)| / bound` over `q ≤ q_max` and `aa, bb` in `1..=coeff_max`.
pub fn weil_sweep(q_max: u64, coeff_max: i64) -> SweepSummary {
    let per_q: Vec<(f64, u64)> = (1..=q_max)
        .into_par_iter()
        .map(|q| {
            let mut worst = 0.0f64;
            let mut bad = 0;
            for aa in 1..=coeff_max {
                for bb in 1..=coeff_max {
                    let w = weil_check(aa, bb, q);
                    worst = worst.max(w.value.abs() / w.bound);
                    bad += (!w.ok) as u64;
                }
            }
            (worst, bad)
        })
        .collect();
    let c = coeff_max.max(0) as u64;
    SweepSummary {
        cases: q_max * c * c,
        max_value: per_q.iter().map(|x| x.0).fold(0.0, f64::max),
        violations: per_q.iter().map(|x| x.1).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_examples() {
        assert!((kloosterman_sum(1, 1, 1) - 1.0).abs() < 1e-12);
        let expect = 2.0 + 2.0 * (4.0 * std::f64::consts::PI / 5.0).cos();
        assert!((kloosterman_sum(1, 1, 5) - expect).abs() < 1e-12);
        assert!((kloosterman_sum(1, 1, 5) - 0.381966).abs() < 1e-6);
        assert!((kloosterman_sum(0, 0, 6) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_in_arguments() {
        for q in 1..80 {
            for a in -3..4 {
                for b in -3..4 {
                    assert!((kloosterman_sum(a, b, q) - kloosterman_sum(b, a, q)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn twisted_examples() {
        assert!((twisted_sum_direct(&KloostermanQuery::new(3, 7, 5, 1)) - 1.0).abs() < 1e-12);
        let q = KloostermanQuery::new(1, 1, 1, 5);
        assert!((twisted_sum_direct(&q) - kloosterman_sum(1, 1, 5)).abs() < 1e-12);
        for d in 1..40u64 {
            for n in 0..d + 2 {
                let count = (0..d)
                    .flat_map(|x| (0..d).map(move |y| (x, y)))
                    .filter(|&(x, y)| (x * y) % d == n % d)
                    .count();
                let v = twisted_sum_direct(&KloostermanQuery::new(0, 0, n, d));
                assert!((v - count as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn fast_path_matches_scan() {
        for d in 1..=60u64 {
            for (m, k, n) in [(1, 1, 1), (2, -3, 4), (0, 5, 6), (7, 0, 12), (-1, -1, 9)] {
                let q = KloostermanQuery::new(m, k, n, d);
                assert!((twisted_sum_direct(&q) - twisted_sum_brute(&q)).abs() < 1e-9, "{q:?}");
            }
        }
    }

    #[test]
    fn decomposition_example() {
        let q = KloostermanQuery::new(1, 2, 2, 4);
        let expect = kloosterman_sum(1, 4, 4) + 2.0 * kloosterman_sum(1, 1, 2);
        assert!((twisted_sum_decomposed(&q) - expect).abs() < 1e-12);
        assert!((twisted_sum_direct(&q) - expect).abs() < 1e-9);
        let q = KloostermanQuery::new(2, 3, 5, 7);
        assert!((twisted_sum_decomposed(&q) - kloosterman_sum(2, 15, 7)).abs() < 1e-12);
    }

    #[test]
    fn negative_k_reduces() {
        for d in 1..50u64 {
            let a = KloostermanQuery::new(3, -4, 6, d);
            assert!((twisted_sum_direct(&a) - twisted_sum_decomposed(&a)).abs() < 1e-6);
        }
    }

    #[test]
    fn sweeps_count_cases() {
        let s = decomposition_sweep(30, 3, 1e-6);
        assert_eq!(s.cases, 30 * 27);
        assert_eq!(s.violations, 0);
        assert!(s.max_value < 1e-9);
        let w = weil_sweep(50, 2);
        assert_eq!((w.cases, w.violations), (200, 0));
        assert!(w.max_value > 0.0 && w.max_value <= 1.0);
    }

    #[test]
    fn weil_examples() {
        let w = weil_check(1, 1, 5);
        assert!(w.ok);
        assert!((w.bound - 2.0 * 5f64.sqrt()).abs() < 1e-12);
        let w = weil_check(0, 0, 13);
        assert!((w.value - 12.0).abs() < 1e-9);
        assert!((w.bound - 26.0).abs() < 1e-9);
        assert!(w.ok);
        assert_eq!(tau(12), 6);
        assert_eq!(tau(1), 1);
    }
}
