use num_bigint::BigInt;
use num_rational::BigRational;

use crate::real::{Precise, Real};
use crate::{Error, Result};

use super::bernoulli::{bernoulli_ref, zeta_neg_int, BERNOULLI_MAX};

/// Euler–Maclaurin truncation control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionProfile {
    /// Accepted error, relative once the value exceeds one in magnitude.
    pub target_abs_err: f64,
    /// Starting number of directly summed terms for `s >= 0`.
    pub em_terms: usize,
    /// Minimum number of Bernoulli corrections before the adaptive cutoff.
    pub em_depth: usize,
}

impl Default for PrecisionProfile {
    fn default() -> Self {
        PrecisionProfile {
            target_abs_err: 1e-12,
            em_terms: 32,
            em_depth: 12,
        }
    }
}

impl PrecisionProfile {
    pub fn with_target(target_abs_err: f64) -> Self {
        PrecisionProfile {
            target_abs_err,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_abs_err > 0.0) || self.em_terms < 8 || self.em_depth < 2 {
            return Err(Error::InvalidArgument(format!("invalid precision profile {self:?}")));
        }
        Ok(())
    }
}

/// Upper bound on directly summed terms.
pub const EM_MAX_TERMS: usize = 1 << 16;
const EM_MAX_DEPTH: usize = BERNOULLI_MAX / 2 - 1;

struct EmOutcome<T> {
    value: T,
    truncation: f64,
    rounding: f64,
}

/// One Euler–Maclaurin evaluation with `n` direct terms.
fn em_once<T: Real>(s: &T, x: &T, n: usize, min_depth: usize, tol: f64) -> EmOutcome<T> {
    let one = T::one();
    let neg_s = -s.clone();
    let mut acc = T::zero();
    let mut mag = 0.0f64;
    for k in 0..n {
        let t = (T::from_u64(k as u64) + x.clone()).powf(&neg_s);
        mag += t.to_f64().abs();
        acc += t;
    }
    let y = T::from_u64(n as u64) + x.clone();
    let y_neg_s = y.powf(&neg_s);
    let integral = y_neg_s.clone() * y.clone() / (s.clone() - one.clone());
    let boundary = y_neg_s.clone() / T::from_i64(2);
    mag += integral.to_f64().abs() + boundary.to_f64().abs();
    acc += integral + boundary;

    // t_j = B_{2j}/(2j)! · s(s+1)…(s+2j−2) · y^{−s−2j+1}
    let inv_y2 = one.clone() / (y.clone() * y.clone());
    let mut poch = s.clone();
    let mut ypow = y_neg_s / y;
    let mut fact = T::from_i64(2);
    let mut truncation = f64::INFINITY;
    let mut prev = f64::INFINITY;
    for j in 1..=EM_MAX_DEPTH {
        let t = T::from_ratio(bernoulli_ref(2 * j)) / fact.clone() * poch.clone() * ypow.clone();
        let tf = t.to_f64().abs();
        if j > 1 && tf > prev {
            // asymptotic series has started to diverge
            truncation = tf;
            break;
        }
        if tf == 0.0 && poch.is_zero() {
            truncation = 0.0;
            break;
        }
        if j > min_depth && tf < tol * 1e-3 {
            truncation = tf;
            break;
        }
        acc += t;
        mag += tf;
        prev = tf;
        let a = s.clone() + T::from_i64(2 * j as i64 - 1);
        let b = s.clone() + T::from_i64(2 * j as i64);
        poch = poch * a * b;
        ypow = ypow * inv_y2.clone();
        fact = fact * T::from_i64((2 * j as i64 + 1) * (2 * j as i64 + 2));
        if j == EM_MAX_DEPTH {
            truncation = (T::from_ratio(bernoulli_ref(2 * j + 2)) / fact.clone() * poch.clone() * ypow.clone())
                .to_f64()
                .abs();
        }
    }
    EmOutcome {
        value: acc,
        truncation,
        rounding: 4.0 * T::EPSILON * mag * (1.0 + (n as f64).log2()),
    }
}

/// ζ(s, x) by Euler–Maclaurin in the scalar type `T`, without escalation.
pub fn hurwitz_zeta_in<T: Real>(s: &T, x: &T, prof: &PrecisionProfile) -> Result<T> {
    prof.validate()?;
    let sf = s.to_f64();
    let xf = x.to_f64();
    if !sf.is_finite() || !(xf > 0.0) || !xf.is_finite() {
        return Err(Error::InvalidArgument(format!("Hurwitz zeta at s = {sf}, x = {xf}")));
    }
    if (s.clone() - T::one()).is_zero() {
        return Err(Error::Pole);
    }
    // Growing terms (s < 0) make large direct sums cancel, so start small.
    let mut n = if sf < 0.0 { 1 } else { prof.em_terms };
    let mut best = f64::INFINITY;
    loop {
        let tol_guess = prof.target_abs_err;
        let out = em_once(s, x, n, prof.em_depth, tol_guess);
        let tol = prof.target_abs_err * out.value.to_f64().abs().max(1.0);
        let err = out.truncation + out.rounding;
        if err <= tol {
            return Ok(out.value);
        }
        best = best.min(err);
        if out.rounding > tol || n >= EM_MAX_TERMS {
            return Err(Error::Precision {
                s: sf,
                x: xf,
                target: prof.target_abs_err,
                achieved: best,
            });
        }
        n *= 2;
    }
}

/// ζ(s, x) for real `s != 1` and `x > 0`.
///
/// Evaluated in `f64` when its rounding error permits, otherwise in [`Precise`]
/// and rounded.
pub fn hurwitz_zeta(s: f64, x: f64, prof: &PrecisionProfile) -> Result<f64> {
    match hurwitz_zeta_in(&s, &x, prof) {
        Err(Error::Precision { .. }) => {
            hurwitz_zeta_in(&Precise::from_f64(s), &Precise::from_f64(x), prof).map(|v| v.to_f64())
        }
        other => other,
    }
}

fn non_positive_integer(s: f64) -> Option<usize> {
    if s <= 0.0 && s.fract() == 0.0 && -s < BERNOULLI_MAX as f64 {
        Some((-s) as usize)
    } else {
        None
    }
}

/// ζ(s); exact Bernoulli values at non-positive integers.
pub fn riemann_zeta_in<T: Real>(s: &T, prof: &PrecisionProfile) -> Result<T> {
    if let Some(k) = non_positive_integer(s.to_f64()) {
        if T::from_i64(-(k as i64)) == *s {
            let one = BigRational::from_integer(BigInt::from(1));
            return Ok(T::from_ratio(&zeta_neg_int(k, &one)?));
        }
    }
    hurwitz_zeta_in(s, &T::one(), prof)
}

pub fn riemann_zeta(s: f64, prof: &PrecisionProfile) -> Result<f64> {
    if let Some(k) = non_positive_integer(s) {
        return riemann_zeta_in(&(-(k as f64)), prof);
    }
    hurwitz_zeta(s, 1.0, prof)
}
