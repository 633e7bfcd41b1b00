//! Primitive three-cylinder square-tiled surfaces in H(1,1).
//!
//! `D(n) = n(n−1)J_2(n)/6 − ((μσ_2) * S_{1,2})(n)` with `*` the Dirichlet convolution.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{dirichlet_convolve, jordan_totient, mobius_table, sigma_table_exact, FactorSieve, MobiusTable};
use crate::convolution::s_ab_exact_batch;
use crate::special::{riemann_zeta, PrecisionProfile};
use crate::sum::Neumaier;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct StsCount {
    pub n: u64,
    pub polynomial_part: BigRational,
    pub convolution_part: BigInt,
    pub d_value: BigInt,
}

/// Tables covering `1..=limit`.
pub struct StsTables {
    limit: u64,
    sieve: FactorSieve,
    mu: MobiusTable,
    mu_sigma2: Vec<BigInt>,
    s12: Vec<BigInt>,
    conv: Vec<BigInt>,
}

impl StsTables {
    pub fn new(limit: u64) -> Result<Self> {
        let top = limit.max(2);
        let sieve = FactorSieve::new(top)?;
        let mu = mobius_table(top)?;
        let sigma2 = sigma_table_exact(2, top)?
            .to_biguint_vec()
            .expect("exact table");
        let mu_sigma2: Vec<BigInt> = mu
            .values()
            .iter()
            .zip(&sigma2)
            .map(|(&m, s)| BigInt::from(m) * BigInt::from(s.clone()))
            .collect();
        let s12: Vec<BigInt> = s_ab_exact_batch(1, 2, top)?.into_iter().map(BigInt::from).collect();
        let conv = dirichlet_convolve(&mu_sigma2, &s12)?;
        Ok(StsTables {
            limit: top,
            sieve,
            mu,
            mu_sigma2,
            s12,
            conv,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn check(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.limit {
            return Err(Error::OutOfRange { n, limit: self.limit });
        }
        Ok(())
    }

    /// `((μσ_2) * S_{1,2})(n)` from the precomputed convolution.
    pub fn convolution_part(&self, n: u64) -> Result<BigInt> {
        self.check(n)?;
        Ok(self.conv[n as usize - 1].clone())
    }

    /// The same value from its divisor-sum definition.
    pub fn convolution_part_direct(&self, n: u64) -> Result<BigInt> {
        self.check(n)?;
        let mut acc = BigInt::zero();
        for d in self.sieve.divisors(n)? {
            if self.mu.get(d)? != 0 {
                acc += &self.mu_sigma2[d as usize - 1] * &self.s12[(n / d) as usize - 1];
            }
        }
        Ok(acc)
    }
}

/// `n(n−1)J_2(n)/6`, kept exact.
pub fn polynomial_part(n: u64, sieve: &FactorSieve) -> Result<BigRational> {
    let j2 = jordan_totient(2, n, sieve)?;
    let num = BigUint::from(n) * BigUint::from(n.saturating_sub(1)) * j2;
    Ok(BigRational::new(BigInt::from(num), BigInt::from(6)))
}

/// Exact `D(n)`; a non-integral difference is reported as an error.
pub fn d_count(n: u64, tables: &StsTables) -> Result<StsCount> {
    let conv = tables.convolution_part(n)?;
    let poly = polynomial_part(n, &tables.sieve)?;
    let d = &poly - BigRational::from_integer(conv.clone());
    if !d.is_integer() {
        return Err(Error::NonIntegral {
            n,
            value: d.to_string(),
        });
    }
    Ok(StsCount {
        n,
        polynomial_part: poly,
        convolution_part: conv,
        d_value: d.to_integer(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityPoint {
    pub count: StsCount,
    /// `D(n) / polynomial_part(n)`.
    pub ratio: f64,
    /// Mean of `ratio` over `2..=n`.
    pub cesaro: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityExperiment {
    pub points: Vec<DensityPoint>,
    /// `1 − ζ(2)ζ(3)/(2ζ(5))`.
    pub target: f64,
}

impl DensityExperiment {
    pub fn final_cesaro(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.cesaro)
    }
}

pub fn density_target() -> Result<f64> {
    let p = PrecisionProfile::default();
    Ok(1.0 - riemann_zeta(2.0, &p)? * riemann_zeta(3.0, &p)? / (2.0 * riemann_zeta(5.0, &p)?))
}

/// Ratios `D(n)/polynomial_part(n)` and their running means for `2 ≤ n ≤ N`.
pub fn density_experiment(limit: u64) -> Result<DensityExperiment> {
    if limit < 100 {
        return Err(Error::InvalidArgument(format!("density experiment needs N >= 100, got {limit}")));
    }
    let tables = StsTables::new(limit)?;
    let counts = (2..=limit)
        .into_par_iter()
        .map(|n| d_count(n, &tables))
        .collect::<Result<Vec<_>>>()?;
    let mut acc = Neumaier::new();
    let points = counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| {
            let ratio = (BigRational::from_integer(count.d_value.clone()) / &count.polynomial_part)
                .to_f64()
                .unwrap_or(f64::NAN);
            acc.add(ratio);
            DensityPoint {
                count,
                ratio,
                cesaro: acc.value() / (i + 1) as f64,
            }
        })
        .collect();
    Ok(DensityExperiment {
        points,
        target: density_target()?,
    })
}
