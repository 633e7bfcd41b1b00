use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{gcd, integer_exponent, mod_inverse, sigma_in, FactorSieve};
use crate::convolution::ExponentPair;
use crate::real::Real;
use crate::special::{bernoulli_poly_coeffs, bernoulli_poly_in, binom_real_in, hurwitz_zeta, zeta_neg_int, PrecisionProfile};
use crate::sum::Neumaier;
use crate::{Error, Result};

use super::ApproxConfig;

/// A residue term together with its truncation diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueTerm<T = f64> {
    pub m: u32,
    pub value: T,
    /// Truncated sum `Σ_{d ≤ d_max} d^{a−b+2m} Σ ζ(−m−a, e1/d) ζ(−m, e2/d)`.
    pub partial: T,
    /// Estimated absolute size of the neglected `d > d_max` part of `partial`.
    pub tail: f64,
}

/// `B_k(e/d) = P(e, d) / (L d^k)` with integer coefficients `c_j` of `P`.
struct HomPoly {
    big: Vec<BigInt>,
    small: Option<Vec<i128>>,
    scale: BigInt,
}

impl HomPoly {
    fn new(k: usize) -> Result<Self> {
        let coeffs = bernoulli_poly_coeffs(k)?;
        let scale = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let big: Vec<BigInt> = coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(scale.clone())).to_integer())
            .collect();
        let small = big.iter().map(|c| c.to_i128()).collect();
        Ok(HomPoly { big, small, scale })
    }

    /// `Σ_j c_j e^j d^{k−j}` by homogeneous Horner.
    fn eval_small(&self, e: u64, d: u64) -> Option<i128> {
        let c = self.small.as_ref()?;
        let k = c.len() - 1;
        let (e, d) = (e as i128, d as i128);
        let mut acc = c[k];
        let mut dp: i128 = 1;
        for j in (0..k).rev() {
            dp = dp.checked_mul(d)?;
            acc = acc.checked_mul(e)?.checked_add(c[j].checked_mul(dp)?)?;
        }
        Some(acc)
    }

    fn eval_big(&self, e: u64, d: u64) -> BigInt {
        let k = self.big.len() - 1;
        let (e, d) = (BigInt::from(e), BigInt::from(d));
        let mut acc = self.big[k].clone();
        let mut dp = BigInt::one();
        for j in (0..k).rev() {
            dp *= &d;
            acc = acc * &e + &self.big[j] * &dp;
        }
        acc
    }

    fn eval(&self, e: u64, d: u64) -> BigInt {
        match self.eval_small(e, d) {
            Some(v) => BigInt::from(v),
            None => self.eval_big(e, d),
        }
    }
}

/// Integer accumulator that spills from `i128` into `BigInt`.
#[derive(Default)]
struct Spill {
    small: i128,
    big: BigInt,
}

impl Spill {
    fn add_small(&mut self, v: i128) {
        match self.small.checked_add(v) {
            Some(s) => self.small = s,
            None => self.big += BigInt::from(v),
        }
    }

    fn add_big(&mut self, v: BigInt) {
        match v.to_i128() {
            Some(s) => self.add_small(s),
            None => self.big += v,
        }
    }

    fn total(self) -> BigInt {
        self.big + BigInt::from(self.small)
    }
}

/// Solutions of `e1 e2 ≡ n (mod d)` with `e1, e2 ∈ 1..=d`, grouped by `e1`.
fn for_each_pair_group(d: u64, n: u64, mut f: impl FnMut(u64, &mut dyn Iterator<Item = u64>)) {
    let nr = n % d;
    for e1 in 1..=d {
        let g = gcd(e1 % d, d);
        if nr % g != 0 {
            continue;
        }
        let dg = d / g;
        let inv = mod_inverse((e1 / g) % dg, dg).expect("coprime after division");
        let e0 = ((nr / g) as u128 * inv as u128 % dg as u128) as u64;
        let mut sols = (0..g).map(|t| {
            let e2 = e0 + t * dg;
            if e2 == 0 {
                d
            } else {
                e2
            }
        });
        f(e1, &mut sols);
    }
}

/// `Σ P1(e1) P2(e2)` over solution pairs, exact.
fn exact_pair_sum(d: u64, n: u64, p1: &HomPoly, p2: &HomPoly) -> BigInt {
    let mut acc = Spill::default();
    for_each_pair_group(d, n, |e1, sols| {
        let mut inner = Spill::default();
        for e2 in sols {
            match p2.eval_small(e2, d) {
                Some(v) => inner.add_small(v),
                None => inner.add_big(p2.eval_big(e2, d)),
            }
        }
        let inner = inner.total();
        if inner.is_zero() {
            return;
        }
        let outer = p1.eval(e1, d);
        match (outer.to_i128(), inner.to_i128()) {
            (Some(x), Some(y)) if x.checked_mul(y).is_some() => acc.add_small(x * y),
            _ => acc.add_big(outer * inner),
        }
    });
    acc.total()
}

/// Per-`d` contributions `d^{a−b+2m} I_d` and whether each vanished identically.
fn exact_terms<T: Real>(m: u32, a: u32, b: f64, n: u64, d_max: u64) -> Result<Vec<(bool, T)>> {
    let k1 = (m + a + 1) as usize;
    let k2 = (m + 1) as usize;
    let p1 = HomPoly::new(k1)?;
    let p2 = HomPoly::new(k2)?;
    // ζ(−k, x) = −B_{k+1}(x)/(k+1); the two minus signs cancel.
    let denom = &p1.scale * &p2.scale * BigInt::from((m + 1) as u64 * (m + a + 1) as u64);
    let denom_t = T::from_bigint(&denom);
    // d^{a−b+2m} / d^{k1+k2} = d^{−b−2}
    let expo = -(T::from_f64(b) + T::from_i64(2));
    (1..=d_max)
        .into_par_iter()
        .map(|d| {
            let s = exact_pair_sum(d, n, &p1, &p2);
            if s.is_zero() {
                return Ok((true, T::zero()));
            }
            let w = T::from_u64(d).powf(&expo);
            Ok((false, T::from_bigint(&s) / denom_t.clone() * w))
        })
        .collect()
}

fn float_terms<T: Real>(m: u32, a: f64, b: f64, n: u64, d_max: u64) -> Result<Vec<(bool, T)>> {
    let prof = PrecisionProfile::default();
    let s1 = -(m as f64) - a;
    let k2 = m as usize + 1;
    (1..=d_max)
        .into_par_iter()
        .map(|d| {
            let df = d as f64;
            let mut z1 = vec![f64::NAN; d as usize + 1];
            let mut z2 = vec![0.0; d as usize + 1];
            for e in 1..=d {
                let x = e as f64 / df;
                z2[e as usize] = -bernoulli_poly_in(k2, &x)? / k2 as f64;
            }
            let mut err = None;
            let mut acc = Neumaier::new();
            for_each_pair_group(d, n, |e1, sols| {
                if err.is_some() {
                    return;
                }
                let inner: f64 = sols.map(|e2| z2[e2 as usize]).sum();
                if z1[e1 as usize].is_nan() {
                    match hurwitz_zeta(s1, e1 as f64 / df, &prof) {
                        Ok(v) => z1[e1 as usize] = v,
                        Err(e) => {
                            err = Some(e);
                            return;
                        }
                    }
                }
                acc.add(z1[e1 as usize] * inner);
            });
            if let Some(e) = err {
                return Err(e);
            }
            let v = acc.value() * df.powf(a - b + 2.0 * m as f64);
            Ok((v == 0.0, T::from_f64(v)))
        })
        .collect()
}

fn odd_positive_integer(a: f64) -> Option<u32> {
    integer_exponent(a).filter(|k| k % 2 == 1)
}

/// `Res(−m)` of the Mellin integrand, with its truncation diagnostics.
///
/// Needs `m < (b−a)/2 − 3/4` for the `d`-sum to converge, except for odd
/// integer `a` on the exact path where only `d | n` contributes.
pub fn residue_term_in<T: Real>(m: u32, a: f64, b: f64, n: u64, cfg: &ApproxConfig) -> Result<ResidueTerm<T>> {
    ExponentPair::new(a, b)?;
    cfg.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let exact_a = integer_exponent(a).filter(|_| cfg.use_exact_bernoulli_path);
    let finite_sum = exact_a.is_some() && odd_positive_integer(a).is_some();
    let bound = (b - a) / 2.0 - 0.75;
    if (m as f64) >= bound && !finite_sum {
        return Err(Error::Divergent { m, bound });
    }

    let terms: Vec<(bool, T)> = match exact_a {
        Some(ia) => exact_terms(m, ia, b, n, cfg.d_max)?,
        None => float_terms(m, a, b, n, cfg.d_max)?,
    };
    let half = (cfg.d_max / 2) as usize;
    let mut lower = T::zero();
    let mut upper = T::zero();
    for (i, (_, t)) in terms.iter().enumerate() {
        if i < half {
            lower += t.clone();
        } else {
            upper += t.clone();
        }
    }
    let partial = lower + upper.clone();
    let tail = if terms[half..].iter().all(|(z, _)| *z) {
        0.0
    } else {
        let mut alpha = a - b + 2.0 * m as f64 + 2.0;
        if alpha >= 0.0 {
            // square-root cancellation in the Kloosterman-type inner sums
            alpha -= 0.5;
        }
        if alpha >= 0.0 {
            return Err(Error::Divergent { m, bound });
        }
        10.0 * upper.to_f64().abs() / (2f64.powf(-alpha) - 1.0)
    };
    let allowed = cfg.tail_tolerance * partial.to_f64().abs();
    if tail > allowed {
        return Err(Error::Tail {
            tail,
            allowed,
            d_max: cfg.d_max,
        });
    }

    let bt = T::from_f64(b);
    let nb = T::from_u64(n).powf(&(bt.clone() - T::from_u64(m as u64)));
    let mut value = nb * binom_real_in(&bt, m) * partial.clone();
    if m % 2 == 1 {
        value = -value;
    }
    Ok(ResidueTerm {
        m,
        value,
        partial,
        tail,
    })
}

/// `Res(−m) = (−1)^m n^{b−m} C(b, m) Σ_d d^{a−b+2m} Σ_{e1 e2 ≡ n (d)} ζ(−m−a, e1/d) ζ(−m, e2/d)`.
pub fn residue_term(m: u32, a: f64, b: f64, n: u64, cfg: &ApproxConfig) -> Result<f64> {
    residue_term_in::<f64>(m, a, b, n, cfg).map(|r| r.value)
}

pub fn residue_closed_form_odd_a_in<T: Real>(m: u32, a: f64, b: f64, n: u64, sieve: &FactorSieve) -> Result<T> {
    let k = odd_positive_integer(a)
        .ok_or_else(|| Error::InvalidArgument(format!("closed form needs an odd positive integer a, got {a}")))?;
    if m > 0 {
        return Ok(T::zero());
    }
    let one = BigRational::one();
    let z = zeta_neg_int(k as usize, &one)?;
    let half_z = T::from_ratio(&(z / BigRational::from_integer(BigInt::from(2))));
    Ok(-(half_z * sigma_in(&T::from_f64(b), n, sieve)?))
}

/// `−½ ζ(−a) σ_b(n)` for `m = 0` and zero for `m ≥ 1`, with `a` odd.
pub fn residue_closed_form_odd_a(m: u32, a: f64, b: f64, n: u64, sieve: &FactorSieve) -> Result<f64> {
    residue_closed_form_odd_a_in(m, a, b, n, sieve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sigma_exact;

    fn brute_pairs(d: u64, n: u64) -> Vec<(u64, u64)> {
        let mut v = Vec::new();
        for e1 in 1..=d {
            for e2 in 1..=d {
                if (e1 * e2) % d == n % d {
                    v.push((e1, e2));
                }
            }
        }
        v
    }

    #[test]
    fn pair_enumeration_matches_scan() {
        for d in 1..40 {
            for n in [1u64, 2, 6, 12, 35, 36] {
                let mut got = Vec::new();
                for_each_pair_group(d, n, |e1, sols| got.extend(sols.map(|e2| (e1, e2))));
                got.sort_unstable();
                assert_eq!(got, brute_pairs(d, n), "d={d} n={n}");
            }
        }
    }

    #[test]
    fn homogeneous_poly_is_scaled_bernoulli() {
        for k in [1usize, 2, 5, 9] {
            let p = HomPoly::new(k).unwrap();
            for (e, d) in [(1u64, 7u64), (3, 7), (7, 7), (5, 12)] {
                let x = BigRational::new(BigInt::from(e), BigInt::from(d));
                let b = crate::special::bernoulli_poly_exact(k, &x).unwrap();
                let dk = BigInt::from(d).pow(k as u32);
                let lhs = BigRational::new(p.eval(e, d), &p.scale * dk);
                assert_eq!(lhs, b);
                assert_eq!(BigInt::from(p.eval_small(e, d).unwrap()), p.eval_big(e, d));
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let s = FactorSieve::new(100).unwrap();
        let v = residue_closed_form_odd_a(0, 3.0, 7.0, 2, &s).unwrap();
        assert!((v + 129.0 / 240.0).abs() < 1e-15);
        assert_eq!(residue_closed_form_odd_a(2, 5.0, 9.0, 7, &s).unwrap(), 0.0);
        let v = residue_closed_form_odd_a(0, 1.0, 2.0, 3, &s).unwrap();
        assert!((v - 10.0 / 24.0).abs() < 1e-15);
        assert!(residue_closed_form_odd_a(0, 2.0, 7.0, 3, &s).is_err());
    }

    #[test]
    fn odd_a_general_sum_reduces_to_closed_form() {
        let cfg = ApproxConfig::default();
        let r = residue_term_in::<f64>(0, 3.0, 7.0, 10, &cfg).unwrap();
        let s = FactorSieve::new(100).unwrap();
        let sig = sigma_exact(7, 10, &s).unwrap().to_f64().unwrap();
        assert!((r.value + sig / 240.0).abs() <= 1e-12 * sig / 240.0);
        assert_eq!(r.tail, 0.0);
        let r1 = residue_term_in::<f64>(1, 3.0, 7.0, 10, &cfg).unwrap();
        assert_eq!(r1.value, 0.0);
    }

    #[test]
    fn even_a_converges_with_tail_estimate() {
        let cfg = ApproxConfig::default();
        let r = residue_term_in::<f64>(0, 2.0, 7.0, 12, &cfg).unwrap();
        assert!(r.tail > 0.0 && r.tail <= cfg.tail_tolerance * r.partial.abs());
        let coarse = ApproxConfig {
            d_max: 1000,
            tail_tolerance: 1e-6,
            ..cfg
        };
        let r2 = residue_term_in::<f64>(0, 2.0, 7.0, 12, &coarse).unwrap();
        assert!(((r.value - r2.value) / r.value).abs() < 1e-8);
    }

    #[test]
    fn float_path_agrees_with_exact_path() {
        let exact = ApproxConfig {
            d_max: 200,
            tail_tolerance: 1e-4,
            use_exact_bernoulli_path: true,
        };
        let float = ApproxConfig {
            use_exact_bernoulli_path: false,
            ..exact
        };
        let a = residue_term(0, 2.0, 7.0, 6, &exact).unwrap();
        let b = residue_term(0, 2.0, 7.0, 6, &float).unwrap();
        assert!(((a - b) / a).abs() < 1e-9, "{a} {b}");
    }

    #[test]
    fn divergent_index_is_refused() {
        let cfg = ApproxConfig::default();
        assert!(matches!(residue_term(1, 2.0, 5.0, 10, &cfg), Err(Error::Divergent { .. })));
        assert!(matches!(residue_term(0, 2.0, 3.0, 10, &cfg), Err(Error::Divergent { .. })));
    }

    #[test]
    fn large_coefficients_stay_exact() {
        let cfg = ApproxConfig {
            d_max: 60,
            ..ApproxConfig::default()
        };
        let r = residue_term_in::<f64>(4, 9.0, 21.0, 30, &cfg).unwrap();
        assert_eq!(r.value, 0.0);
    }
}
