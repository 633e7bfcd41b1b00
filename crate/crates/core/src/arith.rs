//! Multiplicative number theory on `1..=N`: a smallest-prime-factor sieve and
//! the arithmetic functions built on it.
//!
//! All tables are 1-based in their public accessors. Arrays passed to
//! [`dirichlet_convolve`] hold `f(1), f(2), ..., f(N)` at indices `0..N`.

use std::ops::{AddAssign, Mul};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::real::Real;
use crate::sum::Neumaier;
use crate::{Error, Result};

/// Largest sieve limit accepted (the `spf` array costs four bytes per entry).
pub const MAX_LIMIT: u64 = 100_000_000;

/// σ, J_k and similar values are either exact integers or floats.
#[derive(Debug, Clone, PartialEq)]
pub enum Number {
    Exact(BigUint),
    Float(f64),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(v) => v.to_f64().unwrap_or(f64::INFINITY),
            Number::Float(v) => *v,
        }
    }

    pub fn as_exact(&self) -> Option<&BigUint> {
        match self {
            Number::Exact(v) => Some(v),
            Number::Float(_) => None,
        }
    }
}

impl std::fmt::Display for Number {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Number::Exact(v) => write!(f, "{v}"),
            Number::Float(v) => write!(f, "{v:.16e}"),
        }
    }
}

/// Returns `Some(k)` when `a` is a nonnegative integer small enough to use
/// as an exact exponent.
pub fn integer_exponent(a: f64) -> Option<u32> {
    if a >= 0.0 && a.fract() == 0.0 && a <= u32::MAX as f64 {
        Some(a as u32)
    } else {
        None
    }
}

fn check_limit(limit: u64, min: u64) -> Result<()> {
    if limit < min || limit > MAX_LIMIT {
        return Err(Error::LimitOutOfRange {
            limit,
            min,
            max: MAX_LIMIT,
        });
    }
    Ok(())
}

/// Smallest prime factor of every integer in `2..=limit`.
#[derive(Debug, Clone)]
pub struct FactorSieve {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl FactorSieve {
    /// Linear sieve; every composite is crossed out once by its smallest prime.
    pub fn new(limit: u64) -> Result<Self> {
        check_limit(limit, 2)?;
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m > n {
                    break;
                }
                spf[m] = p;
            }
        }
        Ok(FactorSieve { limit, spf, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    fn check(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.limit {
            return Err(Error::OutOfRange {
                n,
                limit: self.limit,
            });
        }
        Ok(())
    }

    /// Smallest prime factor of `n`, for `2 <= n <= limit`.
    pub fn spf(&self, n: u64) -> Result<u64> {
        self.check(n)?;
        if n < 2 {
            return Err(Error::OutOfRange {
                n,
                limit: self.limit,
            });
        }
        Ok(self.spf[n as usize] as u64)
    }

    /// Prime factorization as `(p, e)` pairs with increasing `p`.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        self.check(n)?;
        let mut out: Vec<(u64, u32)> = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        Ok(out)
    }

    /// Divisors of `n` in increasing order.
    pub fn divisors(&self, n: u64) -> Result<Vec<u64>> {
        let mut divs = vec![1u64];
        for (p, e) in self.factorize(n)? {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        Ok(divs)
    }

    /// Number of divisors τ(n).
    pub fn tau(&self, n: u64) -> Result<u64> {
        Ok(self
            .factorize(n)?
            .iter()
            .map(|&(_, e)| e as u64 + 1)
            .product())
    }
}

/// Convenience constructor mirroring [`FactorSieve::new`].
pub fn build_factor_sieve(limit: u64) -> Result<FactorSieve> {
    FactorSieve::new(limit)
}

/// σ_a(n): exact when `a` is a nonnegative integer, compensated float sum otherwise.
pub fn sigma(a: f64, n: u64, sieve: &FactorSieve) -> Result<Number> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("exponent must be >= 0, got {a}")));
    }
    match integer_exponent(a) {
        Some(k) => sigma_exact(k, n, sieve).map(Number::Exact),
        None => sigma_float(a, n, sieve).map(Number::Float),
    }
}

/// Exact σ_k(n) from the factorization: Π (p^{k(e+1)} − 1)/(p^k − 1).
pub fn sigma_exact(k: u32, n: u64, sieve: &FactorSieve) -> Result<BigUint> {
    let mut acc = BigUint::one();
    for (p, e) in sieve.factorize(n)? {
        if k == 0 {
            acc *= e + 1;
            continue;
        }
        let pk: BigUint = Pow::pow(BigUint::from(p), k);
        let mut term = BigUint::one();
        let mut pw = BigUint::one();
        for _ in 0..e {
            pw *= &pk;
            term += &pw;
        }
        acc *= term;
    }
    Ok(acc)
}

/// σ_a(n) by compensated summation over the divisors.
pub fn sigma_float(a: f64, n: u64, sieve: &FactorSieve) -> Result<f64> {
    let mut acc = Neumaier::new();
    for d in sieve.divisors(n)? {
        acc.add((d as f64).powf(a));
    }
    Ok(acc.value())
}

/// σ_a(n) in an arbitrary [`Real`] type; exact before conversion for integer `a`.
pub fn sigma_in<T: Real>(a: &T, n: u64, sieve: &FactorSieve) -> Result<T> {
    if let Some(k) = integer_exponent(a.to_f64()).filter(|&k| T::from_u64(k as u64) == *a) {
        return sigma_exact(k, n, sieve).map(|v| T::from_biguint(&v));
    }
    let mut acc = T::zero();
    for d in sieve.divisors(n)? {
        acc += T::from_u64(d).powf(a);
    }
    Ok(acc)
}

/// Storage behind a [`SigmaTable`]; index 0 is a zero pad so `v[n] = σ_a(n)`.
#[derive(Debug, Clone)]
pub enum SigmaValues {
    U64(Vec<u64>),
    U128(Vec<u128>),
    Big(Vec<BigUint>),
    Float(Vec<f64>),
}

/// σ_a(1..=N) for a fixed exponent.
#[derive(Debug, Clone)]
pub struct SigmaTable {
    exponent: f64,
    limit: u64,
    values: SigmaValues,
}

impl SigmaTable {
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.values, SigmaValues::Float(_))
    }

    pub fn values(&self) -> &SigmaValues {
        &self.values
    }

    pub fn get(&self, n: u64) -> Result<Number> {
        if n == 0 || n > self.limit {
            return Err(Error::OutOfRange {
                n,
                limit: self.limit,
            });
        }
        let i = n as usize;
        Ok(match &self.values {
            SigmaValues::U64(v) => Number::Exact(BigUint::from(v[i])),
            SigmaValues::U128(v) => Number::Exact(BigUint::from(v[i])),
            SigmaValues::Big(v) => Number::Exact(v[i].clone()),
            SigmaValues::Float(v) => Number::Float(v[i]),
        })
    }

    /// Entry as `f64` (rounded for exact tables).
    pub fn get_f64(&self, n: u64) -> Result<f64> {
        self.get(n).map(|v| v.to_f64())
    }

    /// Exact entry, or `None` for a float table or out-of-range `n`.
    pub fn get_exact(&self, n: u64) -> Option<BigUint> {
        match self.get(n) {
            Ok(Number::Exact(v)) => Some(v),
            _ => None,
        }
    }

    /// All entries `σ_a(1), ..., σ_a(N)` as `f64`.
    pub fn to_f64_vec(&self) -> Vec<f64> {
        match &self.values {
            SigmaValues::U64(v) => v[1..].iter().map(|&x| x as f64).collect(),
            SigmaValues::U128(v) => v[1..].iter().map(|&x| x as f64).collect(),
            SigmaValues::Big(v) => v[1..].iter().map(|x| x.to_f64().unwrap_or(f64::INFINITY)).collect(),
            SigmaValues::Float(v) => v[1..].to_vec(),
        }
    }

    /// All entries as exact integers; `None` for a float table.
    pub fn to_biguint_vec(&self) -> Option<Vec<BigUint>> {
        match &self.values {
            SigmaValues::U64(v) => Some(v[1..].iter().map(|&x| BigUint::from(x)).collect()),
            SigmaValues::U128(v) => Some(v[1..].iter().map(|&x| BigUint::from(x)).collect()),
            SigmaValues::Big(v) => Some(v[1..].to_vec()),
            SigmaValues::Float(_) => None,
        }
    }
}

/// σ_a(1..=N); exact for nonnegative integer `a`.
pub fn sigma_table(a: f64, limit: u64) -> Result<SigmaTable> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("exponent must be >= 0, got {a}")));
    }
    match integer_exponent(a) {
        Some(k) => sigma_table_exact(k, limit),
        None => sigma_table_float(a, limit),
    }
}

/// Exact divisor sieve. Uses machine words while they suffice.
pub fn sigma_table_exact(k: u32, limit: u64) -> Result<SigmaTable> {
    check_limit(limit, 1)?;
    let n = limit as usize;
    let values = match sigma_sieve_u128(k, n) {
        Some(v) => {
            if v.iter().all(|&x| x <= u64::MAX as u128) {
                SigmaValues::U64(v.into_iter().map(|x| x as u64).collect())
            } else {
                SigmaValues::U128(v)
            }
        }
        None => SigmaValues::Big(sigma_sieve_big(k, n)),
    };
    Ok(SigmaTable {
        exponent: k as f64,
        limit,
        values,
    })
}

fn sigma_sieve_u128(k: u32, n: usize) -> Option<Vec<u128>> {
    let mut v = vec![0u128; n + 1];
    for d in 1..=n {
        let pw = (d as u128).checked_pow(k)?;
        let mut m = d;
        while m <= n {
            v[m] = v[m].checked_add(pw)?;
            m += d;
        }
    }
    Some(v)
}

fn sigma_sieve_big(k: u32, n: usize) -> Vec<BigUint> {
    let mut v = vec![BigUint::zero(); n + 1];
    for d in 1..=n {
        let pw: BigUint = Pow::pow(BigUint::from(d), k);
        let mut m = d;
        while m <= n {
            v[m] += &pw;
            m += d;
        }
    }
    v
}

/// Float divisor sieve: `d^a` is computed once per `d`, sums are compensated.
pub fn sigma_table_float(a: f64, limit: u64) -> Result<SigmaTable> {
    check_limit(limit, 1)?;
    let n = limit as usize;
    let mut sum = vec![0f64; n + 1];
    let mut comp = vec![0f64; n + 1];
    for d in 1..=n {
        let pw = (d as f64).powf(a);
        let mut m = d;
        while m <= n {
            let s = sum[m];
            let t = s + pw;
            if s.abs() >= pw.abs() {
                comp[m] += (s - t) + pw;
            } else {
                comp[m] += (pw - t) + s;
            }
            sum[m] = t;
            m += d;
        }
    }
    for (s, c) in sum.iter_mut().zip(&comp) {
        *s += c;
    }
    Ok(SigmaTable {
        exponent: a,
        limit,
        values: SigmaValues::Float(sum),
    })
}

/// σ_a(1..=N) in an arbitrary [`Real`] type; entry `i` holds σ_a(i + 1).
pub fn sigma_values_in<T: Real>(a: f64, limit: u64) -> Result<Vec<T>> {
    check_limit(limit, 1)?;
    let n = limit as usize;
    let a_t = T::from_f64(a);
    let mut v = vec![T::zero(); n];
    for d in 1..=n {
        let pw = T::from_u64(d as u64).powf(&a_t);
        let mut m = d;
        while m <= n {
            v[m - 1] += pw.clone();
            m += d;
        }
    }
    Ok(v)
}

/// μ(1..=N).
#[derive(Debug, Clone)]
pub struct MobiusTable {
    mu: Vec<i8>,
}

impl MobiusTable {
    pub fn limit(&self) -> u64 {
        (self.mu.len() - 1) as u64
    }

    pub fn get(&self, n: u64) -> Result<i8> {
        if n == 0 || n > self.limit() {
            return Err(Error::OutOfRange {
                n,
                limit: self.limit(),
            });
        }
        Ok(self.mu[n as usize])
    }

    /// μ(1), ..., μ(N).
    pub fn values(&self) -> &[i8] {
        &self.mu[1..]
    }
}

pub fn mobius_table(limit: u64) -> Result<MobiusTable> {
    check_limit(limit, 1)?;
    let n = limit as usize;
    let mut mu = vec![0i8; n + 1];
    mu[1] = 1;
    if n >= 2 {
        let sieve = FactorSieve::new(limit)?;
        for i in 2..=n {
            let p = sieve.spf[i] as usize;
            let q = i / p;
            mu[i] = if q % p == 0 { 0 } else { -mu[q] };
        }
    }
    Ok(MobiusTable { mu })
}

/// J_k(n) = n^k Π_{p | n} (1 − p^{−k}), evaluated as Π p^{k(e−1)} (p^k − 1).
pub fn jordan_totient(k: u32, n: u64, sieve: &FactorSieve) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::InvalidArgument("Jordan totient order must be positive".into()));
    }
    let mut acc = BigUint::one();
    for (p, e) in sieve.factorize(n)? {
        let pk: BigUint = Pow::pow(BigUint::from(p), k);
        acc *= Pow::pow(pk.clone(), e - 1) * (pk - 1u32);
    }
    Ok(acc)
}

/// `out[n] = Σ_{d | n} f[d] g[n/d]` over 0-based slices holding values at `1..=N`.
pub fn dirichlet_convolve<T>(f: &[T], g: &[T]) -> Result<Vec<T>>
where
    T: Clone + Zero + AddAssign,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    if f.len() != g.len() {
        return Err(Error::LengthMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    let n = f.len();
    let mut out = vec![T::zero(); n];
    for d in 1..=n {
        let fd = &f[d - 1];
        if fd.is_zero() {
            continue;
        }
        let mut e = 1;
        while d * e <= n {
            out[d * e - 1] += fd * &g[e - 1];
            e += 1;
        }
    }
    Ok(out)
}

/// Converts a Möbius table into a convolution operand.
pub fn mobius_as_bigint(mu: &MobiusTable) -> Vec<BigInt> {
    mu.values().iter().map(|&m| BigInt::from(m)).collect()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    if m > i64::MAX as u64 {
        let e = (a as i128 % m as i128).extended_gcd(&(m as i128));
        return (e.gcd == 1).then(|| e.x.rem_euclid(m as i128) as u64);
    }
    let (mut r0, mut r1) = (m as i64, (a % m) as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i64) as u64)
}
