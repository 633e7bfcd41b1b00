//! Additive convolutions `S_{a,b}(n) = Σ_{k=1}^{n-1} σ_a(k) σ_b(n-k)` and the
//! exact identity checks built on them.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use std::fmt;

use crate::arith::{integer_exponent, sigma_table, sigma_table_exact, sigma_values_in, Number, SigmaTable, SigmaValues};
use crate::real::Real;
use crate::sum::Neumaier;
use crate::{Error, Result};

/// Error-term regime of an exponent pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `b − a > 3/2`
    Wide,
    /// `max(a, 2 − a) < b ≤ a + 3/2`
    Narrow,
    /// everything else, including `a = b`
    Halberstam,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Wide => "WIDE",
            Regime::Narrow => "NARROW",
            Regime::Halberstam => "HALBERSTAM",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Exponents `0 < a ≤ b` with their regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentPair {
    a: f64,
    b: f64,
    regime: Regime,
}

impl ExponentPair {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!("exponents must be positive and finite, got ({a}, {b})")));
        }
        if b < a {
            return Err(Error::InvalidArgument(format!("expected a <= b, got ({a}, {b})")));
        }
        Ok(ExponentPair {
            a,
            b,
            regime: classify(a, b),
        })
    }

    /// Accepts either order; `S_{a,b}` is symmetric.
    pub fn ordered(a: f64, b: f64) -> Result<Self> {
        if a <= b {
            Self::new(a, b)
        } else {
            Self::new(b, a)
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Both exponents are integers, so `S_{a,b}` is computed exactly.
    pub fn is_integral(&self) -> bool {
        integer_exponent(self.a).is_some() && integer_exponent(self.b).is_some()
    }
}

fn classify(a: f64, b: f64) -> Regime {
    if b - a > 1.5 {
        Regime::Wide
    } else if a.max(2.0 - a) < b {
        Regime::Narrow
    } else {
        Regime::Halberstam
    }
}

/// One value `S_{a,b}(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionResult {
    pub n: u64,
    pub value: Number,
    pub exponents: ExponentPair,
}

fn check_table(t: &SigmaTable, e: f64, n: u64) -> Result<()> {
    if t.exponent() != e {
        return Err(Error::ExponentMismatch {
            table: t.exponent(),
            requested: e,
        });
    }
    if n > t.limit() + 1 {
        return Err(Error::OutOfRange {
            n: n - 1,
            limit: t.limit(),
        });
    }
    Ok(())
}

/// `S_{a,b}(n)` from precomputed tables covering `1..n-1`.
pub fn s_ab(a: f64, b: f64, n: u64, ta: &SigmaTable, tb: &SigmaTable) -> Result<ConvolutionResult> {
    let exponents = ExponentPair::ordered(a, b)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    check_table(ta, a, n)?;
    check_table(tb, b, n)?;
    Ok(ConvolutionResult {
        n,
        value: convolve_at(ta, tb, n as usize),
        exponents,
    })
}

fn convolve_at(ta: &SigmaTable, tb: &SigmaTable, n: usize) -> Number {
    match (ta.values(), tb.values()) {
        (SigmaValues::U64(x), SigmaValues::U64(y)) => Number::Exact(dot_u64(x, y, n)),
        (SigmaValues::Float(_), _) | (_, SigmaValues::Float(_)) => Number::Float(dot_float(ta, tb, n)),
        _ => Number::Exact(dot_big(ta, tb, n)),
    }
}

/// Σ x[k] y[n−k] with u64 products in a 192-bit accumulator.
fn dot_u64(x: &[u64], y: &[u64], n: usize) -> BigUint {
    let mut lo: u128 = 0;
    let mut hi: u64 = 0;
    for k in 1..n {
        let p = x[k] as u128 * y[n - k] as u128;
        let (s, carry) = lo.overflowing_add(p);
        lo = s;
        hi += carry as u64;
    }
    (BigUint::from(hi) << 128u32) + BigUint::from(lo)
}

fn entry_big(t: &SigmaTable, k: usize) -> BigUint {
    match t.values() {
        SigmaValues::U64(v) => BigUint::from(v[k]),
        SigmaValues::U128(v) => BigUint::from(v[k]),
        SigmaValues::Big(v) => v[k].clone(),
        SigmaValues::Float(_) => unreachable!("exact table"),
    }
}

#[inline]
fn entry_f64(t: &SigmaTable, k: usize) -> f64 {
    match t.values() {
        SigmaValues::U64(v) => v[k] as f64,
        SigmaValues::U128(v) => v[k] as f64,
        SigmaValues::Big(v) => v[k].to_f64().unwrap_or(f64::INFINITY),
        SigmaValues::Float(v) => v[k],
    }
}

fn dot_big(ta: &SigmaTable, tb: &SigmaTable, n: usize) -> BigUint {
    let mut acc = BigUint::zero();
    for k in 1..n {
        acc += entry_big(ta, k) * entry_big(tb, n - k);
    }
    acc
}

/// Pairs `k` with `n − k` so that swapping the tables gives the identical float.
fn dot_float(ta: &SigmaTable, tb: &SigmaTable, n: usize) -> f64 {
    if let (SigmaValues::Float(x), SigmaValues::Float(y)) = (ta.values(), tb.values()) {
        return dot_float_slices(x, y, n);
    }
    let mut acc = Neumaier::new();
    for k in 1..=n / 2 {
        let j = n - k;
        if k < j {
            acc.add(entry_f64(ta, k) * entry_f64(tb, j) + entry_f64(ta, j) * entry_f64(tb, k));
        } else {
            acc.add(entry_f64(ta, k) * entry_f64(tb, k));
        }
    }
    acc.value()
}

fn dot_float_slices(x: &[f64], y: &[f64], n: usize) -> f64 {
    let mut acc = Neumaier::new();
    for k in 1..=n / 2 {
        let j = n - k;
        if k < j {
            acc.add(x[k] * y[j] + x[j] * y[k]);
        } else {
            acc.add(x[k] * y[k]);
        }
    }
    acc.value()
}

/// `S_{a,b}(n)` for `n = 1..=N`, computed in parallel over `n`.
pub fn s_ab_batch(a: f64, b: f64, limit: u64) -> Result<Vec<ConvolutionResult>> {
    let exponents = ExponentPair::ordered(a, b)?;
    if limit == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let tlim = (limit - 1).max(1);
    let ta = sigma_table(a, tlim)?;
    let tb = sigma_table(b, tlim)?;
    Ok((1..=limit as usize)
        .into_par_iter()
        .map(|n| ConvolutionResult {
            n: n as u64,
            value: convolve_at(&ta, &tb, n),
            exponents,
        })
        .collect())
}

/// Exact `S_{a,b}(n)` for integer exponents over `n = 1..=N`, as integers.
pub fn s_ab_exact_batch(a: u32, b: u32, limit: u64) -> Result<Vec<BigUint>> {
    if limit == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let tlim = (limit - 1).max(1);
    let ta = sigma_table_exact(a, tlim)?;
    let tb = sigma_table_exact(b, tlim)?;
    Ok((1..=limit as usize)
        .into_par_iter()
        .map(|n| match convolve_at(&ta, &tb, n) {
            Number::Exact(v) => v,
            Number::Float(_) => unreachable!("exact tables"),
        })
        .collect())
}

/// `S_{a,b}(n)` for each requested `n`, evaluated in the scalar type `T`.
///
/// Integer exponent pairs are computed exactly and then converted.
pub fn s_ab_values_in<T: Real>(a: f64, b: f64, ns: &[u64]) -> Result<Vec<T>> {
    ExponentPair::ordered(a, b)?;
    let top = ns.iter().copied().max().unwrap_or(1);
    let tlim = top.saturating_sub(1).max(1);
    if let (Some(ia), Some(ib)) = (integer_exponent(a), integer_exponent(b)) {
        let ta = sigma_table_exact(ia, tlim)?;
        let tb = sigma_table_exact(ib, tlim)?;
        return ns
            .par_iter()
            .map(|&n| match convolve_at(&ta, &tb, n as usize) {
                Number::Exact(v) => Ok(T::from_biguint(&v)),
                Number::Float(_) => unreachable!("exact tables"),
            })
            .collect();
    }
    let (xa, xb) = rayon::join(|| sigma_values_in::<T>(a, tlim), || sigma_values_in::<T>(b, tlim));
    let (xa, xb) = (xa?, xb?);
    Ok(ns
        .par_iter()
        .map(|&n| {
            let n = n as usize;
            let mut acc = T::zero();
            for k in 1..n {
                acc += xa[k - 1].clone() * xb[n - k - 1].clone();
            }
            acc
        })
        .collect())
}

/// `S^k_{1,1}(n) = Σ_{kα + β = n} σ_1(α) σ_1(β)` using a σ_1 table covering `n`.
pub fn s_weighted_with(kw: u64, n: u64, sigma1: &SigmaTable) -> Result<BigUint> {
    if kw == 0 || n == 0 {
        return Err(Error::InvalidArgument("weight and n must be positive".into()));
    }
    check_table(sigma1, 1.0, n)?;
    let mut acc = BigUint::zero();
    let mut alpha = 1;
    while kw * alpha < n {
        let beta = n - kw * alpha;
        acc += sigma1.get_exact(alpha).expect("exact") * sigma1.get_exact(beta).expect("exact");
        alpha += 1;
    }
    Ok(acc)
}

pub fn s_weighted(kw: u64, n: u64) -> Result<BigUint> {
    let t = sigma_table_exact(1, n.max(1))?;
    s_weighted_with(kw, n, &t)
}

/// Outcome of an exact identity sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub check: String,
    /// Sign fixed by the probe, for identities with a sign to determine.
    pub sign: Option<i8>,
    pub n_checked: u64,
    /// `(n, residual)` for every nonzero residual.
    pub failures: Vec<(u64, BigInt)>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// σ_k(n) by trial division, independent of the sieve.
fn sigma_brute(k: u32, n: u64) -> BigInt {
    (1..=n)
        .filter(|d| n % d == 0)
        .map(|d| num_traits::pow(BigInt::from(d), k as usize))
        .sum()
}

fn s33_brute(n: u64) -> BigInt {
    (1..n).map(|k| sigma_brute(3, k) * sigma_brute(3, n - k)).sum()
}

/// Sign ε with `120 S_{3,3}(n) = σ_7(n) + ε σ_3(n)` at the probe points.
fn probe_s33_sign() -> Result<i8> {
    for eps in [1i8, -1] {
        let ok = [2u64, 3, 4].iter().all(|&n| {
            BigInt::from(120) * s33_brute(n) == sigma_brute(7, n) + BigInt::from(eps) * sigma_brute(3, n)
        });
        if ok {
            return Ok(eps);
        }
    }
    Err(Error::Identity("no sign fits 120 S33 = σ7 ± σ3 at the probe points".into()))
}

/// Exhaustive exact check of `120 S_{3,3}(n) = σ_7(n) + ε σ_3(n)` for `2 ≤ n ≤ N`.
pub fn verify_identity_s33(limit: u64) -> Result<IdentityReport> {
    if limit < 2 {
        return Err(Error::InvalidArgument("N must be at least 2".into()));
    }
    let eps = probe_s33_sign()?;
    let s = s_ab_exact_batch(3, 3, limit)?;
    let s3 = sigma_table_exact(3, limit)?;
    let s7 = sigma_table_exact(7, limit)?;
    let failures = (2..=limit)
        .into_par_iter()
        .filter_map(|n| {
            let lhs = BigInt::from(120) * BigInt::from(s[n as usize - 1].clone());
            let rhs = BigInt::from(s7.get_exact(n).unwrap())
                + BigInt::from(eps) * BigInt::from(s3.get_exact(n).unwrap());
            let r = lhs - rhs;
            (!r.is_zero()).then_some((n, r))
        })
        .collect();
    Ok(IdentityReport {
        check: "s33".into(),
        sign: Some(eps),
        n_checked: limit - 1,
        failures,
    })
}

fn sigma_at(t: &SigmaTable, n: u64, div: u64) -> BigInt {
    if n % div == 0 {
        BigInt::from(t.get_exact(n / div).unwrap())
    } else {
        BigInt::zero()
    }
}

/// Right-hand side of the weighted closed form times its common denominator.
fn s11k_cleared_rhs(kw: u64, n: u64, s1: &SigmaTable, s3: &SigmaTable) -> BigInt {
    let nn = BigInt::from(n);
    let c = |v: i64| BigInt::from(v);
    match kw {
        // 24 S²
        2 => {
            c(2) * sigma_at(s3, n, 1) + c(8) * sigma_at(s3, n, 2) - c(3) * &nn * sigma_at(s1, n, 1)
                - c(6) * &nn * sigma_at(s1, n, 2)
                + sigma_at(s1, n, 1)
                + sigma_at(s1, n, 2)
        }
        // 48 S⁴
        4 => {
            sigma_at(s3, n, 1) + c(3) * sigma_at(s3, n, 2) + c(16) * sigma_at(s3, n, 4)
                - c(3) * &nn * sigma_at(s1, n, 1)
                - c(12) * &nn * sigma_at(s1, n, 4)
                + c(2) * sigma_at(s1, n, 1)
                + c(2) * sigma_at(s1, n, 4)
        }
        _ => unreachable!("validated weight"),
    }
}

/// Exact check of the closed forms for `S^2_{1,1}` and `S^4_{1,1}` over `1 ≤ n ≤ N`.
pub fn verify_identity_s11k(kw: u64, limit: u64) -> Result<IdentityReport> {
    let denom = match kw {
        2 => 24,
        4 => 48,
        _ => return Err(Error::InvalidArgument(format!("weight must be 2 or 4, got {kw}"))),
    };
    if limit == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let s1 = sigma_table_exact(1, limit)?;
    let s3 = sigma_table_exact(3, limit)?;
    let failures = (1..=limit)
        .into_par_iter()
        .filter_map(|n| {
            let lhs = BigInt::from(denom) * BigInt::from(s_weighted_with(kw, n, &s1).unwrap());
            let r = lhs - s11k_cleared_rhs(kw, n, &s1, &s3);
            (!r.is_zero()).then_some((n, r))
        })
        .collect();
    Ok(IdentityReport {
        check: format!("s11k{kw}"),
        sign: None,
        n_checked: limit,
        failures,
    })
}

/// `f64` view of a convolution value.
pub fn value_f64(r: &ConvolutionResult) -> f64 {
    match &r.value {
        Number::Exact(v) => v.to_f64().unwrap_or(f64::INFINITY),
        Number::Float(v) => *v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(r: &ConvolutionResult) -> u64 {
        r.value.as_exact().unwrap().to_u64().unwrap()
    }

    #[test]
    fn regimes() {
        assert_eq!(ExponentPair::new(1.0, 3.0).unwrap().regime(), Regime::Wide);
        assert_eq!(ExponentPair::new(1.0, 2.0).unwrap().regime(), Regime::Narrow);
        assert_eq!(ExponentPair::new(3.0, 3.0).unwrap().regime(), Regime::Halberstam);
        assert_eq!(ExponentPair::new(0.5, 1.2).unwrap().regime(), Regime::Halberstam);
        assert_eq!(ExponentPair::new(1.5, 2.5).unwrap().regime(), Regime::Narrow);
        assert_eq!(ExponentPair::new(3.0, 4.5).unwrap().regime(), Regime::Narrow);
        assert!(ExponentPair::new(2.0, 1.0).is_err());
        assert!(ExponentPair::new(0.0, 1.0).is_err());
        assert_eq!(ExponentPair::ordered(2.0, 1.0).unwrap().a(), 1.0);
    }

    #[test]
    fn single_values() {
        let t1 = sigma_table(1.0, 10).unwrap();
        let t3 = sigma_table(3.0, 10).unwrap();
        assert_eq!(exact(&s_ab(1.0, 1.0, 5, &t1, &t1).unwrap()), 38);
        assert_eq!(exact(&s_ab(1.0, 1.0, 1, &t1, &t1).unwrap()), 0);
        assert_eq!(exact(&s_ab(3.0, 3.0, 3, &t3, &t3).unwrap()), 18);
        assert!(s_ab(1.0, 3.0, 5, &t3, &t3).is_err());
        assert!(s_ab(1.0, 1.0, 12, &t1, &t1).is_err());
        assert!(s_ab(1.0, 1.0, 11, &t1, &t1).is_ok());
    }

    #[test]
    fn batch_values() {
        let v: Vec<u64> = s_ab_batch(1.0, 1.0, 5).unwrap().iter().map(exact).collect();
        assert_eq!(v, vec![0, 1, 6, 17, 38]);
        let v: Vec<u64> = s_ab_batch(1.0, 2.0, 4).unwrap().iter().map(exact).collect();
        assert_eq!(v, vec![0, 1, 8, 29]);
        assert_eq!(s_ab_batch(2.0, 1.0, 1).unwrap()[0].value, Number::Exact(0u32.into()));
    }

    #[test]
    fn float_path_matches_integer_path() {
        let ints = s_ab_batch(1.0, 1.0, 100).unwrap();
        let t = crate::arith::sigma_table_float(1.0, 100).unwrap();
        for r in &ints[1..] {
            let f = match s_ab(1.0, 1.0, r.n, &t, &t).unwrap().value {
                Number::Float(f) => f,
                _ => panic!("float table"),
            };
            let e = value_f64(r);
            assert!(((f - e) / e).abs() <= 1e-10);
        }
    }

    #[test]
    fn float_symmetry_is_exact() {
        let ta = sigma_table(1.5, 200).unwrap();
        let tb = sigma_table(2.7, 200).unwrap();
        for n in 1..=200 {
            let x = s_ab(1.5, 2.7, n, &ta, &tb).unwrap().value;
            let y = s_ab(2.7, 1.5, n, &tb, &ta).unwrap().value;
            assert_eq!(x, y);
        }
    }

    #[test]
    fn big_tables_use_bignum_kernel() {
        let t = sigma_table(13.0, 30).unwrap();
        let v = s_ab(13.0, 13.0, 31, &t, &t).unwrap();
        let mut expect = BigUint::zero();
        for k in 1..31u64 {
            expect += t.get_exact(k).unwrap() * t.get_exact(31 - k).unwrap();
        }
        assert_eq!(v.value, Number::Exact(expect));
    }

    #[test]
    fn generic_values_match() {
        let ns = [2u64, 10, 57];
        let f: Vec<f64> = s_ab_values_in(1.5, 2.5, &ns).unwrap();
        let ta = sigma_table(1.5, 60).unwrap();
        let tb = sigma_table(2.5, 60).unwrap();
        for (i, &n) in ns.iter().enumerate() {
            let r = value_f64(&s_ab(1.5, 2.5, n, &ta, &tb).unwrap());
            assert!(((f[i] - r) / r).abs() < 1e-13);
        }
        let p: Vec<crate::Precise> = s_ab_values_in(1.0, 2.0, &[5]).unwrap();
        assert_eq!(p[0].to_f64(), 78.0);
    }

    #[test]
    fn weighted_values() {
        assert_eq!(s_weighted(1, 5).unwrap(), 38u32.into());
        assert_eq!(s_weighted(2, 3).unwrap(), 1u32.into());
        assert_eq!(s_weighted(2, 2).unwrap(), 0u32.into());
        assert_eq!(s_weighted(4, 5).unwrap(), 1u32.into());
        assert!(s_weighted(0, 5).is_err());
    }

    #[test]
    fn s33_identity() {
        let r = verify_identity_s33(300).unwrap();
        assert_eq!(r.sign, Some(-1));
        assert_eq!(r.n_checked, 299);
        assert!(r.passed());
        assert_eq!(s33_brute(3), BigInt::from(18));
        assert_eq!(s33_brute(2), BigInt::from(1));
    }

    #[test]
    fn s11k_identities() {
        let s1 = sigma_table_exact(1, 10).unwrap();
        let s3 = sigma_table_exact(3, 10).unwrap();
        assert_eq!(s11k_cleared_rhs(2, 2, &s1, &s3), BigInt::zero());
        assert_eq!(s11k_cleared_rhs(2, 3, &s1, &s3), BigInt::from(24));
        assert!(verify_identity_s11k(2, 400).unwrap().passed());
        assert!(verify_identity_s11k(4, 400).unwrap().passed());
        assert!(verify_identity_s11k(3, 10).is_err());
    }
}
