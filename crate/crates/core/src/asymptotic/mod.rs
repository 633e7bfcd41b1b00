//! Asymptotic expansion of `S_{a,b}(n)` and the empirical checks around it.
//!
//! The expansion has up to three kinds of terms:
//!
//! * main: `Γ(a+1)Γ(b+1)/Γ(a+b+2) · ζ(a+1)ζ(b+1)/ζ(a+b+2) · σ_{a+b+1}(n)`
//! * secondary: `ζ(1−a)ζ(b+1)/((b+1)ζ(b−a+2)) · n^a σ_{b−a+1}(n)`
//! * residues `Res(−m)` of the gamma factor, one for each integer
//!   `0 ≤ m < (b−a)/2 − 3/4`.
//!
//! Which terms enter depends on the [`Regime`] of the exponent pair. Every
//! evaluation is generic over [`Real`] so that residuals far below the size of
//! `S_{a,b}(n)` can be measured in [`Precise`](crate::Precise).

mod fit;
mod lemmas;
mod residue;

use crate::arith::{sigma_in, FactorSieve};
use crate::convolution::{ExponentPair, Regime};
use crate::real::Real;
use crate::special::{beta_factor_in, riemann_zeta_in, PrecisionProfile};
use crate::{Error, Result};

pub use fit::{error_exponent_fit, fit_power_law, geometric_grid, FitPoint, FitResult};
pub use lemmas::{
    dirichlet_identity_check, hurwitz_sigma_identity_check, restricted_power_sum_check, DirichletCheck,
    HurwitzSigmaCheck, PowerSumCheck,
};
pub use residue::{residue_closed_form_odd_a, residue_closed_form_odd_a_in, residue_term, residue_term_in, ResidueTerm};

/// Controls the truncated `d`-sum of the residue terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxConfig {
    pub d_max: u64,
    /// Largest accepted ratio of the estimated tail to the partial sum.
    pub tail_tolerance: f64,
    /// Use exact Bernoulli arithmetic whenever `a` is a positive integer.
    pub use_exact_bernoulli_path: bool,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        ApproxConfig {
            d_max: 2000,
            tail_tolerance: 1e-9,
            use_exact_bernoulli_path: true,
        }
    }
}

impl ApproxConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d_max < 10 || !(self.tail_tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!("invalid approximation config {self:?}")));
        }
        Ok(())
    }
}

/// Structured approximation of `S_{a,b}(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion<T = f64> {
    pub exponents: ExponentPair,
    pub n: u64,
    pub main: T,
    /// Zero when the regime carries no secondary term.
    pub secondary: T,
    pub residues: Vec<(u32, T)>,
    pub approx: T,
    pub predicted_error_exponent: f64,
}

impl<T: Real> Expansion<T> {
    pub fn regime(&self) -> Regime {
        self.exponents.regime()
    }

    pub fn to_f64(&self) -> Expansion<f64> {
        Expansion {
            exponents: self.exponents,
            n: self.n,
            main: self.main.to_f64(),
            secondary: self.secondary.to_f64(),
            residues: self.residues.iter().map(|(m, v)| (*m, v.to_f64())).collect(),
            approx: self.approx.to_f64(),
            predicted_error_exponent: self.predicted_error_exponent,
        }
    }
}

/// Zeta evaluations accurate to the working precision of `T`.
pub(crate) fn profile_for<T: Real>() -> PrecisionProfile {
    if T::EPSILON < 1e-30 {
        PrecisionProfile {
            target_abs_err: 1e-50,
            em_terms: 64,
            em_depth: 24,
        }
    } else {
        PrecisionProfile::default()
    }
}

fn zeta<T: Real>(s: T) -> Result<T> {
    riemann_zeta_in(&s, &profile_for::<T>())
}

/// Exponents combined in `T`, so no intermediate rounds to `f64`.
struct Exps<T> {
    a: T,
    b: T,
    one: T,
}

impl<T: Real> Exps<T> {
    fn new(a: f64, b: f64) -> Self {
        Exps {
            a: T::from_f64(a),
            b: T::from_f64(b),
            one: T::one(),
        }
    }
}

/// Error exponent of the expansion in each regime.
pub fn predicted_error_exponent(pair: &ExponentPair) -> f64 {
    let (a, b) = (pair.a(), pair.b());
    match pair.regime() {
        Regime::Wide => (a + b) / 2.0 + 0.75,
        Regime::Narrow => (a + b) / 2.0 + 1.0,
        Regime::Halberstam => {
            if a > 1.0 && b > 1.0 {
                a + b
            } else if a < 1.0 && b < 1.0 {
                a + b + 1.0 - a * b / (a + b - a * b)
            } else {
                a + b + 1.0 - a.min(b)
            }
        }
    }
}

/// Residue indices `m` with `0 ≤ m < (b−a)/2 − 3/4`.
pub fn residue_indices(pair: &ExponentPair) -> Vec<u32> {
    let bound = (pair.b() - pair.a()) / 2.0 - 0.75;
    (0..).take_while(|&m| (m as f64) < bound).collect()
}

/// Coefficient of `σ_{a+b+1}(n)` in the main term.
pub fn main_coefficient_in<T: Real>(a: f64, b: f64) -> Result<T> {
    let x = Exps::<T>::new(a, b);
    let beta = beta_factor_in(&x.a, &x.b)?;
    let two = x.one.clone() + x.one.clone();
    Ok(beta * zeta(x.a.clone() + x.one.clone())? * zeta(x.b.clone() + x.one.clone())? / zeta(x.a + x.b + two)?)
}

pub fn main_term_in<T: Real>(a: f64, b: f64, n: u64, sieve: &FactorSieve) -> Result<T> {
    ExponentPair::ordered(a, b)?;
    let x = Exps::<T>::new(a, b);
    Ok(main_coefficient_in::<T>(a, b)? * sigma_in(&(x.a + x.b + x.one), n, sieve)?)
}

/// `Γ(a+1)Γ(b+1)/Γ(a+b+2) · ζ(a+1)ζ(b+1)/ζ(a+b+2) · σ_{a+b+1}(n)`.
pub fn main_term(a: f64, b: f64, n: u64, sieve: &FactorSieve) -> Result<f64> {
    main_term_in(a, b, n, sieve)
}

/// Coefficient of `n^a σ_{b−a+1}(n)` in the secondary term.
pub fn secondary_coefficient_in<T: Real>(a: f64, b: f64) -> Result<T> {
    if !(a > 0.0 && b > a) {
        return Err(Error::Regime(format!(
            "secondary term needs b > a > 0, got a = {a}, b = {b}"
        )));
    }
    let x = Exps::<T>::new(a, b);
    let one = x.one.clone();
    let num = zeta(one.clone() - x.a.clone())? * zeta(x.b.clone() + one.clone())?;
    let den = (x.b.clone() + one.clone()) * zeta(x.b - x.a + one.clone() + one)?;
    Ok(num / den)
}

pub fn secondary_term_in<T: Real>(a: f64, b: f64, n: u64, sieve: &FactorSieve) -> Result<T> {
    let c = secondary_coefficient_in::<T>(a, b)?;
    if c.is_zero() {
        return Ok(c);
    }
    let x = Exps::<T>::new(a, b);
    let na = T::from_u64(n).powf(&x.a);
    Ok(c * na * sigma_in(&(x.b - x.a + x.one), n, sieve)?)
}

/// `ζ(1−a)ζ(b+1)/((b+1)ζ(b−a+2)) · n^a σ_{b−a+1}(n)`; refuses `a = b`.
pub fn secondary_term(a: f64, b: f64, n: u64, sieve: &FactorSieve) -> Result<f64> {
    secondary_term_in(a, b, n, sieve)
}

/// Largest `log10` magnitude handled by the `f64` expansion.
const F64_LOG10_LIMIT: f64 = 300.0;

/// Full expansion in the scalar type `T`.
pub fn expand_in<T: Real>(a: f64, b: f64, n: u64, cfg: &ApproxConfig) -> Result<Expansion<T>> {
    let pair = ExponentPair::new(a, b)?;
    cfg.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if T::EPSILON > 1e-20 && (a + b + 1.0) * (n as f64).log10() > F64_LOG10_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "n^(a+b+1) exceeds double range for a = {a}, b = {b}, n = {n}"
        )));
    }
    let sieve = FactorSieve::new(n.max(2))?;
    let main = main_term_in::<T>(a, b, n, &sieve)?;
    let regime = pair.regime();
    let secondary = match regime {
        Regime::Wide | Regime::Narrow => secondary_term_in::<T>(a, b, n, &sieve)?,
        Regime::Halberstam => T::zero(),
    };
    let mut residues = Vec::new();
    if regime == Regime::Wide {
        for m in residue_indices(&pair) {
            residues.push((m, residue_term_in::<T>(m, a, b, n, cfg)?.value));
        }
    }
    let mut approx = main.clone() + secondary.clone();
    for (_, r) in &residues {
        approx += r.clone();
    }
    Ok(Expansion {
        exponents: pair,
        n,
        main,
        secondary,
        residues,
        approx,
        predicted_error_exponent: predicted_error_exponent(&pair),
    })
}

/// Expansion of `S_{a,b}(n)` for `0 < a ≤ b` in `f64`.
pub fn expand(a: f64, b: f64, n: u64, cfg: &ApproxConfig) -> Result<Expansion> {
    expand_in::<f64>(a, b, n, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sigma_exact;
    use crate::Precise;

    fn sieve() -> FactorSieve {
        FactorSieve::new(2000).unwrap()
    }

    #[test]
    fn main_coefficients() {
        let c: f64 = main_coefficient_in(1.0, 2.0).unwrap();
        assert!((c - 0.158907).abs() < 1e-6);
        let c: f64 = main_coefficient_in(3.0, 3.0).unwrap();
        assert!((c - 1.0 / 120.0).abs() < 1e-14);
        let s = sieve();
        assert_eq!(main_term(1.0, 2.0, 1, &s).unwrap(), c_main(1.0, 2.0));
    }

    fn c_main(a: f64, b: f64) -> f64 {
        main_coefficient_in(a, b).unwrap()
    }

    #[test]
    fn secondary_examples() {
        let s = sieve();
        for n in [1u64, 6, 97, 360] {
            let v = secondary_term(1.0, 2.0, n, &s).unwrap();
            let sig2 = sigma_exact(2, n, &s).unwrap();
            let expect = -(n as f64) * num_traits::ToPrimitive::to_f64(&sig2).unwrap() / 6.0;
            assert!((v - expect).abs() <= 1e-13 * expect.abs(), "n={n}");
        }
        assert_eq!(secondary_term(3.0, 5.5, 10, &s).unwrap(), 0.0);
        let v = secondary_term(2.0, 4.0, 6, &s).unwrap();
        let p = PrecisionProfile::default();
        let z5 = crate::special::riemann_zeta(5.0, &p).unwrap();
        let z4 = std::f64::consts::PI.powi(4) / 90.0;
        let expect = (-1.0 / 12.0) * z5 / (5.0 * z4) * 36.0 * 252.0;
        assert!((v - expect).abs() < 1e-12 * expect.abs());
        assert!(matches!(secondary_term(2.0, 2.0, 6, &s), Err(Error::Regime(_))));
    }

    #[test]
    fn regimes_and_exponents() {
        let e = expand(3.0, 7.0, 10, &ApproxConfig::default()).unwrap();
        assert_eq!(e.regime(), Regime::Wide);
        assert_eq!(e.residues.iter().map(|r| r.0).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(e.residues[1].1, 0.0);
        assert_eq!(e.predicted_error_exponent, 5.75);
        let e = expand(1.0, 2.0, 1000, &ApproxConfig::default()).unwrap();
        assert_eq!(e.regime(), Regime::Narrow);
        assert!(e.residues.is_empty());
        assert_eq!(e.approx, e.main + e.secondary);
        assert_eq!(e.predicted_error_exponent, 2.5);
        let e = expand(0.5, 0.6, 50, &ApproxConfig::default()).unwrap();
        assert_eq!(e.regime(), Regime::Halberstam);
        assert!((e.predicted_error_exponent - 1.725).abs() < 1e-12);
        assert_eq!(e.secondary, 0.0);
        let pair = ExponentPair::new(1.2, 1.5).unwrap();
        assert_eq!(pair.regime(), Regime::Narrow);
        let pair = ExponentPair::new(0.5, 1.0).unwrap();
        assert_eq!(predicted_error_exponent(&pair), 1.5 + 1.0 - 0.5);
        let pair = ExponentPair::new(3.0, 3.0).unwrap();
        assert_eq!(predicted_error_exponent(&pair), 6.0);
    }

    #[test]
    fn expansion_tracks_exact_values() {
        let exact: Vec<f64> = crate::convolution::s_ab_values_in(1.0, 2.0, &[10_000]).unwrap();
        let e = expand(1.0, 2.0, 10_000, &ApproxConfig::default()).unwrap();
        let rel = (exact[0] - e.approx) / exact[0];
        assert!(rel.abs() < 1e-4, "{rel}");
        assert!(e.main > 0.0);
    }

    #[test]
    fn precise_and_f64_agree() {
        for &(a, b, n) in &[(1.0, 2.0, 1000u64), (3.0, 7.0, 360), (1.5, 2.5, 500), (3.0, 4.8, 256)] {
            let f = expand(a, b, n, &ApproxConfig::default()).unwrap();
            let p = expand_in::<Precise>(a, b, n, &ApproxConfig::default()).unwrap().to_f64();
            assert!(((f.approx - p.approx) / p.approx).abs() < 1e-12, "({a},{b},{n})");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let cfg = ApproxConfig::default();
        assert!(expand(2.0, 1.0, 10, &cfg).is_err());
        assert!(expand(1.0, 2.0, 0, &cfg).is_err());
        let bad = ApproxConfig {
            d_max: 5,
            ..cfg
        };
        assert!(expand(1.0, 2.0, 10, &bad).is_err());
        assert!(expand(9.0, 12.0, 1_000_000_000, &cfg).is_err());
    }
}
