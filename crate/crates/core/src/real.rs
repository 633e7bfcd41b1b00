//! Scalar abstraction shared by the numeric kernels.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

/// Mantissa width of [`Precise`].
pub const PRECISE_BITS: usize = 192;

const RM: RoundingMode = RoundingMode::ToEven;

/// Real scalar used by the generic special-function and expansion code.
pub trait Real:
    Clone
    + fmt::Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + 'static
{
    /// Unit roundoff of the type.
    const EPSILON: f64;

    fn from_f64(v: f64) -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_biguint(v: &BigUint) -> Self;
    fn to_f64(&self) -> f64;

    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn powf(&self, e: &Self) -> Self;
    fn powi(&self, e: i32) -> Self;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
    fn pi() -> Self;

    fn zero() -> Self {
        Self::from_i64(0)
    }

    fn one() -> Self {
        Self::from_i64(1)
    }

    fn is_zero(&self) -> bool {
        self.to_f64() == 0.0
    }

    fn from_u64(v: u64) -> Self {
        match i64::try_from(v) {
            Ok(i) => Self::from_i64(i),
            Err(_) => Self::from_biguint(&BigUint::from(v)),
        }
    }

    fn from_bigint(v: &BigInt) -> Self {
        let m = Self::from_biguint(v.magnitude());
        if v.is_negative() {
            -m
        } else {
            m
        }
    }

    fn from_ratio(v: &BigRational) -> Self {
        Self::from_bigint(v.numer()) / Self::from_bigint(v.denom())
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;

    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_biguint(v: &BigUint) -> Self {
        v.to_f64().unwrap_or(f64::INFINITY)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn powf(&self, e: &Self) -> Self {
        f64::powf(*self, *e)
    }
    fn powi(&self, e: i32) -> Self {
        f64::powi(*self, e)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Binary floating point with a [`PRECISE_BITS`]-bit mantissa.
#[derive(Clone)]
pub struct Precise(BigFloat);

impl Precise {
    pub fn inner(&self) -> &BigFloat {
        &self.0
    }

    fn wrap(v: BigFloat) -> Self {
        debug_assert!(!v.is_nan(), "NaN in extended-precision arithmetic");
        Precise(v)
    }

    fn shifted(mut self, bits: i64) -> Self {
        if self.0.is_zero() {
            return self;
        }
        let e = self.0.exponent().expect("finite value") as i64 + bits;
        self.0.set_exponent(e as astro_float::Exponent);
        self
    }
}

impl fmt::Debug for Precise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Precise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl PartialEq for Precise {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Precise {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl Add for Precise {
    type Output = Precise;
    fn add(self, rhs: Self) -> Self {
        Precise::wrap(self.0.add(&rhs.0, PRECISE_BITS, RM))
    }
}

impl AddAssign for Precise {
    fn add_assign(&mut self, rhs: Self) {
        self.0 = self.0.add(&rhs.0, PRECISE_BITS, RM);
    }
}

impl Sub for Precise {
    type Output = Precise;
    fn sub(self, rhs: Self) -> Self {
        Precise::wrap(self.0.sub(&rhs.0, PRECISE_BITS, RM))
    }
}

impl Mul for Precise {
    type Output = Precise;
    fn mul(self, rhs: Self) -> Self {
        Precise::wrap(self.0.mul(&rhs.0, PRECISE_BITS, RM))
    }
}

impl Div for Precise {
    type Output = Precise;
    fn div(self, rhs: Self) -> Self {
        Precise::wrap(self.0.div(&rhs.0, PRECISE_BITS, RM))
    }
}

impl Neg for Precise {
    type Output = Precise;
    fn neg(self) -> Self {
        Precise(self.0.neg())
    }
}

impl Real for Precise {
    const EPSILON: f64 = 3.2e-58; // 2^-191

    fn from_f64(v: f64) -> Self {
        Precise::wrap(BigFloat::from_f64(v, PRECISE_BITS))
    }

    fn from_i64(v: i64) -> Self {
        Precise::wrap(BigFloat::from_i64(v, PRECISE_BITS))
    }

    fn from_biguint(v: &BigUint) -> Self {
        // Only the leading limbs can influence a 192-bit mantissa.
        let digits = v.to_u64_digits();
        let keep = digits.len().min(4);
        let skipped = digits.len() - keep;
        let mut acc = BigFloat::from_u8(0, PRECISE_BITS);
        for &d in digits[skipped..].iter().rev() {
            let shifted = Precise(acc).shifted(64).0;
            acc = shifted.add(&BigFloat::from_u64(d, PRECISE_BITS), PRECISE_BITS, RM);
        }
        Precise::wrap(acc).shifted(64 * skipped as i64)
    }

    fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        if self.0.is_zero() {
            return 0.0;
        }
        let (words, _, sign, exp, _) = self.0.as_raw_parts().expect("finite value");
        // Value is 0.m * 2^exp with the most significant word last.
        let n = words.len();
        let hi = words[n - 1] as u128;
        let lo = if n >= 2 { words[n - 2] as u128 } else { 0 };
        let mut top = (hi << 64) | lo;
        if n >= 3 && words[..n - 2].iter().any(|&w| w != 0) {
            top |= 1; // sticky bit keeps the conversion correctly rounded
        }
        let m = top as f64;
        let scaled = ldexp(m, exp as i32 - 128);
        if sign == Sign::Neg {
            -scaled
        } else {
            scaled
        }
    }

    fn ln(&self) -> Self {
        Precise::wrap(with_consts(|cc| self.0.ln(PRECISE_BITS, RM, cc)))
    }

    fn exp(&self) -> Self {
        Precise::wrap(with_consts(|cc| self.0.exp(PRECISE_BITS, RM, cc)))
    }

    fn powf(&self, e: &Self) -> Self {
        if let Some(i) = small_integer(e) {
            return self.powi(i);
        }
        if let Some(i) = small_integer(&(e.clone() * Precise::from_i64(2))) {
            return self.sqrt().powi(i);
        }
        // BigFloat::pow does not terminate on some exactly representable results
        // (4^0.5 among them), so go through exp and ln.
        (e.clone() * self.ln()).exp()
    }

    fn powi(&self, e: i32) -> Self {
        let p = Precise::wrap(self.0.powi(e.unsigned_abs() as usize, PRECISE_BITS, RM));
        if e < 0 {
            Precise::one() / p
        } else {
            p
        }
    }

    fn sqrt(&self) -> Self {
        Precise::wrap(self.0.sqrt(PRECISE_BITS, RM))
    }

    fn abs(&self) -> Self {
        Precise(self.0.abs())
    }

    fn pi() -> Self {
        Precise::wrap(with_consts(|cc| cc.pi(PRECISE_BITS, RM)))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

fn small_integer(e: &Precise) -> Option<i32> {
    let f = e.to_f64();
    if f.fract() == 0.0 && f.abs() <= 64.0 && Precise::from_f64(f) == *e {
        Some(f as i32)
    } else {
        None
    }
}

/// `m * 2^e` without intermediate overflow or underflow for moderate `m`.
fn ldexp(m: f64, e: i32) -> f64 {
    let mut v = m;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn f64_round_trip() {
        for &x in &[1.0, -2.5, 0.1, 1e-300, 3.7e250, std::f64::consts::PI, -1e-5, 123456789.125] {
            assert_eq!(Precise::from_f64(x).to_f64(), x, "{x}");
        }
        assert_eq!(Precise::zero().to_f64(), 0.0);
    }

    #[test]
    fn to_f64_rounds_to_nearest() {
        let third = Precise::one() / Precise::from_i64(3);
        assert_eq!(third.to_f64(), 1.0 / 3.0);
        let tenth = Precise::one() / Precise::from_i64(10);
        assert_eq!(tenth.to_f64(), 0.1);
    }

    #[test]
    fn big_integers_convert_exactly_when_representable() {
        let v: BigUint = BigUint::from(1u8) << 300usize;
        assert_eq!(Precise::from_biguint(&v).to_f64(), 2f64.powi(300));
        let w: BigUint = "123456789012345678901234567890123456789".parse().unwrap();
        let p = Precise::from_biguint(&w);
        let back = p.to_f64();
        assert_eq!(back, w.to_f64().unwrap());
        let neg = Precise::from_bigint(&-BigInt::from(w));
        assert_eq!(neg.to_f64(), -back);
    }

    #[test]
    fn resolves_beyond_double_precision() {
        let big = Precise::from_f64(1e20);
        let sum = big.clone() + Precise::one() - big;
        assert_eq!(sum.to_f64(), 1.0);
    }

    #[test]
    fn transcendental_agreement_with_f64() {
        for &x in &[0.5, 2.0, 7.25, 1234.5] {
            let p = Precise::from_f64(x);
            assert!((p.ln().to_f64() - x.ln()).abs() <= 1e-15 * x.ln().abs().max(1.0));
            assert!((p.sqrt().to_f64() - x.sqrt()).abs() <= 1e-15 * x.sqrt());
            let e = Precise::from_f64(-2.3);
            let r = p.powf(&e).to_f64();
            assert!((r - x.powf(-2.3)).abs() <= 1e-14 * r);
        }
        assert_eq!(Precise::pi().to_f64(), std::f64::consts::PI);
        assert_eq!(Precise::from_f64(2.0).powi(-3).to_f64(), 0.125);
    }

    #[test]
    fn powers_with_exact_results() {
        for &(x, e, want) in &[(4.0, 0.5, 2.0), (9.0, -0.5, 1.0 / 3.0), (16.0, 1.5, 64.0), (1.0, 0.3, 1.0), (16.0, 0.25, 2.0)] {
            let r = Precise::from_f64(x).powf(&Precise::from_f64(e)).to_f64();
            assert!((r - want).abs() <= 1e-15 * want, "{x}^{e} = {r}");
        }
    }

    #[test]
    fn ordering() {
        assert!(Precise::from_f64(1.0) < Precise::from_f64(1.5));
        assert!(Precise::from_f64(-3.0).abs() > Precise::from_i64(2));
    }
}
