use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::real::Real;
use crate::{Error, Result};

/// Highest Bernoulli index held by the cache.
pub const BERNOULLI_MAX: usize = 64;

fn cache() -> &'static [BigRational] {
    static CACHE: OnceLock<Vec<BigRational>> = OnceLock::new();
    CACHE.get_or_init(|| {
        // Σ_{j=0}^{k} C(k+1, j) B_j = 0, solved for B_k.
        let mut b: Vec<BigRational> = Vec::with_capacity(BERNOULLI_MAX + 1);
        b.push(BigRational::one());
        for k in 1..=BERNOULLI_MAX {
            let mut acc = BigRational::zero();
            let mut binom = BigInt::one(); // C(k+1, j)
            for (j, bj) in b.iter().enumerate() {
                if !bj.is_zero() {
                    acc += bj * BigRational::from_integer(binom.clone());
                }
                binom = binom * BigInt::from(k + 1 - j) / BigInt::from(j + 1);
            }
            // binom is now C(k+1, k) = k + 1
            b.push(-acc / BigRational::from_integer(binom));
        }
        b
    })
}

/// Exact `B_k` with the convention `B_1 = -1/2`.
pub fn bernoulli_number(k: usize) -> Result<BigRational> {
    cache().get(k).cloned().ok_or(Error::BernoulliIndex {
        index: k,
        max: BERNOULLI_MAX,
    })
}

pub(crate) fn bernoulli_ref(k: usize) -> &'static BigRational {
    &cache()[k]
}

/// Coefficients `c_j` of `B_k(x) = Σ_j c_j x^j`, lowest degree first.
pub fn bernoulli_poly_coeffs(k: usize) -> Result<Vec<BigRational>> {
    if k > BERNOULLI_MAX {
        return Err(Error::BernoulliIndex {
            index: k,
            max: BERNOULLI_MAX,
        });
    }
    let mut coeffs = vec![BigRational::zero(); k + 1];
    let mut binom = BigInt::one(); // C(k, j)
    for j in 0..=k {
        coeffs[k - j] = bernoulli_ref(j) * BigRational::from_integer(binom.clone());
        binom = binom * BigInt::from(k - j) / BigInt::from(j + 1);
    }
    Ok(coeffs)
}

/// Exact `B_k(x)` for rational `x`.
pub fn bernoulli_poly_exact(k: usize, x: &BigRational) -> Result<BigRational> {
    let coeffs = bernoulli_poly_coeffs(k)?;
    let mut acc = BigRational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    Ok(acc)
}

/// `B_k(x)` in `f64`. The argument is converted to its exact binary rational and
/// the polynomial is evaluated exactly, so the only error is the final rounding.
pub fn bernoulli_poly(k: usize, x: f64) -> Result<f64> {
    let xr = BigRational::from_float(x)
        .ok_or_else(|| Error::InvalidArgument(format!("non-finite argument {x}")))?;
    let v = bernoulli_poly_exact(k, &xr)?;
    Ok(f64::from_ratio(&v))
}

/// Horner evaluation of `B_k(x)` in any [`Real`] type.
pub fn bernoulli_poly_in<T: Real>(k: usize, x: &T) -> Result<T> {
    let coeffs = bernoulli_poly_coeffs(k)?;
    let mut acc = T::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x.clone() + T::from_ratio(c);
    }
    Ok(acc)
}

/// `ζ(−k, x) = −B_{k+1}(x)/(k+1)`, exact for rational `x` in `(0, 1]`.
pub fn zeta_neg_int(k: usize, x: &BigRational) -> Result<BigRational> {
    if k > BERNOULLI_MAX - 1 {
        return Err(Error::BernoulliIndex {
            index: k + 1,
            max: BERNOULLI_MAX,
        });
    }
    if *x <= BigRational::zero() || *x > BigRational::one() {
        return Err(Error::InvalidArgument(format!("Hurwitz argument {x} outside (0, 1]")));
    }
    let b = bernoulli_poly_exact(k + 1, x)?;
    Ok(-b / BigRational::from_integer(BigInt::from(k + 1)))
}

/// Float form of [`zeta_neg_int`].
pub fn zeta_neg_int_f64(k: usize, x: f64) -> Result<f64> {
    let xr = BigRational::from_float(x)
        .ok_or_else(|| Error::InvalidArgument(format!("non-finite argument {x}")))?;
    zeta_neg_int(k, &xr).map(|v| f64::from_ratio(&v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn numbers() {
        assert_eq!(bernoulli_number(0).unwrap(), q(1, 1));
        assert_eq!(bernoulli_number(1).unwrap(), q(-1, 2));
        assert_eq!(bernoulli_number(2).unwrap(), q(1, 6));
        assert_eq!(bernoulli_number(4).unwrap(), q(-1, 30));
        assert_eq!(bernoulli_number(7).unwrap(), q(0, 1));
        assert_eq!(bernoulli_number(12).unwrap(), q(-691, 2730));
        assert!(bernoulli_number(65).is_err());
        let b64 = bernoulli_number(64).unwrap();
        // von Staudt-Clausen: primes p with (p - 1) | 64
        assert_eq!(b64.denom(), &BigInt::from(2 * 3 * 5 * 17));
    }

    #[test]
    fn odd_indices_vanish() {
        for j in 1..32 {
            assert!(bernoulli_number(2 * j + 1).unwrap().is_zero());
        }
    }

    #[test]
    fn polynomial_examples() {
        assert_eq!(bernoulli_poly(1, 0.25).unwrap(), -0.25);
        assert_eq!(bernoulli_poly(2, 0.0).unwrap(), 1.0 / 6.0);
        let a = bernoulli_poly(3, 0.7).unwrap();
        let b = bernoulli_poly(3, 0.3).unwrap();
        assert!((a + b).abs() < 1e-14);
        assert_eq!(bernoulli_poly_exact(2, &q(1, 2)).unwrap(), q(-1, 12));
    }

    #[test]
    fn generic_matches_exact() {
        for k in 0..12 {
            for &x in &[0.1, 0.37, 0.5, 0.9] {
                let e = bernoulli_poly(k, x).unwrap();
                let g = bernoulli_poly_in(k, &x).unwrap();
                assert!((e - g).abs() < 1e-13, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn zeta_special_values() {
        assert_eq!(zeta_neg_int(0, &q(1, 1)).unwrap(), q(-1, 2));
        assert_eq!(zeta_neg_int(1, &q(1, 2)).unwrap(), q(1, 24));
        assert_eq!(zeta_neg_int(3, &q(1, 1)).unwrap(), q(1, 120));
        assert_eq!(zeta_neg_int(1, &q(1, 1)).unwrap(), q(-1, 12));
        assert!(zeta_neg_int(1, &q(0, 1)).is_err());
        assert!(zeta_neg_int(64, &q(1, 1)).is_err());
        assert_eq!(zeta_neg_int_f64(0, 0.3).unwrap(), 0.2);
    }
}
