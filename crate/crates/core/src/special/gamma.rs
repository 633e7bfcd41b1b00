use crate::real::Real;
use crate::{Error, Result};

use super::bernoulli::bernoulli_ref;

/// Stirling series for ln Γ(y), valid once `y` is shifted past `shift_to`.
fn stirling<T: Real>(y: &T, terms: usize) -> T {
    let half = T::from_f64(0.5);
    let two_pi = T::pi() * T::from_i64(2);
    let mut acc = (y.clone() - half.clone()) * y.ln() - y.clone() + half * two_pi.ln();
    let inv = T::one() / y.clone();
    let inv2 = inv.clone() * inv.clone();
    let mut pw = inv; // y^{-(2j-1)}
    for j in 1..=terms {
        let k = 2 * j as i64;
        let c = T::from_ratio(bernoulli_ref(2 * j)) / T::from_i64(k * (k - 1));
        acc += c * pw.clone();
        pw = pw * inv2.clone();
    }
    acc
}

/// ln Γ(x) for `x > 0`.
pub fn log_gamma_in<T: Real>(x: &T) -> Result<T> {
    if !(x.to_f64() > 0.0) || !x.to_f64().is_finite() {
        return Err(Error::InvalidArgument(format!(
            "log-gamma argument must be positive and finite, got {}",
            x.to_f64()
        )));
    }
    // Precise needs a larger shift and more terms to reach its own epsilon.
    let (shift_to, terms) = if T::EPSILON < 1e-20 { (40.0, 30) } else { (10.0, 10) };
    let mut y = x.clone();
    let mut prod = T::one();
    while y.to_f64() < shift_to {
        prod = prod * y.clone();
        y = y + T::one();
    }
    Ok(stirling(&y, terms) - prod.ln())
}

pub fn log_gamma(x: f64) -> Result<f64> {
    log_gamma_in(&x)
}

pub fn gamma_real_in<T: Real>(x: &T) -> Result<T> {
    Ok(log_gamma_in(x)?.exp())
}

/// Γ(x) for `x > 0`.
pub fn gamma_real(x: f64) -> Result<f64> {
    gamma_real_in(&x)
}

/// Γ(a+1)Γ(b+1)/Γ(a+b+2).
pub fn beta_factor_in<T: Real>(a: &T, b: &T) -> Result<T> {
    let one = T::one();
    let la = log_gamma_in(&(a.clone() + one.clone()))?;
    let lb = log_gamma_in(&(b.clone() + one.clone()))?;
    let lab = log_gamma_in(&(a.clone() + b.clone() + one.clone() + one))?;
    Ok((la + lb - lab).exp())
}

pub fn beta_factor(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "beta factor needs positive exponents, got ({a}, {b})"
        )));
    }
    beta_factor_in(&a, &b)
}

/// Generalized binomial coefficient b(b−1)…(b−m+1)/m!.
pub fn binom_real_in<T: Real>(b: &T, m: u32) -> T {
    let mut acc = T::one();
    for i in 0..m {
        acc = acc * (b.clone() - T::from_i64(i as i64)) / T::from_i64(i as i64 + 1);
    }
    acc
}

pub fn binom_real(b: f64, m: u32) -> f64 {
    binom_real_in(&b, m)
}
