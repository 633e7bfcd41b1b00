use rayon::prelude::*;

use crate::arith::{gcd, sigma_float, FactorSieve};
use crate::special::{beta_factor, hurwitz_zeta, riemann_zeta, PrecisionProfile};
use crate::sum::Neumaier;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSumCheck {
    pub exact: f64,
    pub main: f64,
    /// `|exact − main| / n^{a+b}`.
    pub deviation: f64,
}

/// `Σ_{j ≡ k (mod m), 0 < j < n} j^a (n−j)^b` against `n^{a+b+1} B(a, b) / m`.
pub fn restricted_power_sum_check(n: u64, m: u64, k: u64, a: f64, b: f64) -> Result<PowerSumCheck> {
    if !(1 <= k && k <= m && m <= n) {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= m <= n, got k = {k}, m = {m}, n = {n}"
        )));
    }
    let nf = n as f64;
    let mut acc = Neumaier::new();
    let mut j = k;
    while j < n {
        acc.add((j as f64).powf(a) * ((n - j) as f64).powf(b));
        j += m;
    }
    let exact = acc.value();
    let main = nf.powf(a + b + 1.0) / m as f64 * beta_factor(a, b)?;
    Ok(PowerSumCheck {
        exact,
        main,
        deviation: (exact - main).abs() / nf.powf(a + b),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    /// Size of the neglected tail, `ζ(s) T^{1−r}/(r−1) + ζ(r) T^{1−s}/(s−1)`.
    pub model: f64,
}

/// Coprime double sum `Σ_{(m,n)=1, m,n ≤ T} n^{−r} m^{−s}` against `ζ(r)ζ(s)/ζ(r+s)`.
pub fn dirichlet_identity_check(r: f64, s: f64, t: u64) -> Result<DirichletCheck> {
    if !(r > 1.0 && s > 1.0) || t < 10 {
        return Err(Error::InvalidArgument(format!(
            "need r, s > 1 and T >= 10, got r = {r}, s = {s}, T = {t}"
        )));
    }
    let rows: Vec<f64> = (1..=t)
        .into_par_iter()
        .map(|n| {
            let mut row = Neumaier::new();
            for m in 1..=t {
                if gcd(n, m) == 1 {
                    row.add((m as f64).powf(-s));
                }
            }
            row.value() * (n as f64).powf(-r)
        })
        .collect();
    let lhs: f64 = rows.into_iter().sum::<Neumaier>().value();
    let p = PrecisionProfile::default();
    let (zr, zs) = (riemann_zeta(r, &p)?, riemann_zeta(s, &p)?);
    let rhs = zr * zs / riemann_zeta(r + s, &p)?;
    let tf = t as f64;
    Ok(DirichletCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
        model: zs * tf.powf(1.0 - r) / (r - 1.0) + zr * tf.powf(1.0 - s) / (s - 1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurwitzSigmaCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    /// Tail model `n^{a+b+1} K D^{−b} / b` fitted from the top half of the `d` range.
    pub model: f64,
}

/// `Σ_{e2 ≤ d} #{e1 : e1 e2 ≡ n} ζ(a+1, e2/d)`.
fn hurwitz_inner(a: f64, n: u64, d: u64, p: &PrecisionProfile) -> Result<f64> {
    let mut acc = Neumaier::new();
    for e2 in 1..=d {
        let g = gcd(e2, d);
        if n % g == 0 {
            acc.add(g as f64 * hurwitz_zeta(a + 1.0, e2 as f64 / d as f64, p)?);
        }
    }
    Ok(acc.value())
}

/// Truncated `Σ_d n^{a+b+1} d^{−a−b−2} Σ_{e1 e2 ≡ n (d)} ζ(a+1, e2/d)` against
/// `ζ(a+1)ζ(b+1)/ζ(a+b+2) σ_{a+b+1}(n)`.
pub fn hurwitz_sigma_identity_check(a: f64, b: f64, n: u64, d_max: u64) -> Result<HurwitzSigmaCheck> {
    if !(b > 0.0 && a > -b && a != 0.0) || n == 0 || d_max < 10 {
        return Err(Error::InvalidArgument(format!(
            "need b > 0, a > -b, a != 0, n >= 1, d_max >= 10; got a = {a}, b = {b}, n = {n}, d_max = {d_max}"
        )));
    }
    let p = PrecisionProfile::default();
    let inner = (1..=d_max)
        .into_par_iter()
        .map(|d| hurwitz_inner(a, n, d, &p))
        .collect::<Result<Vec<f64>>>()?;
    let scale = (n as f64).powf(a + b + 1.0);
    let lhs = scale
        * inner
            .iter()
            .enumerate()
            .map(|(i, v)| v * ((i + 1) as f64).powf(-a - b - 2.0))
            .sum::<Neumaier>()
            .value();
    let sieve = FactorSieve::new(n.max(2))?;
    let rhs = riemann_zeta(a + 1.0, &p)? * riemann_zeta(b + 1.0, &p)? / riemann_zeta(a + b + 2.0, &p)?
        * sigma_float(a + b + 1.0, n, &sieve)?;
    let k = inner
        .iter()
        .enumerate()
        .skip((d_max / 2) as usize)
        .map(|(i, v)| v.abs() / ((i + 1) as f64).powf(a + 1.0))
        .fold(0.0, f64::max);
    Ok(HurwitzSigmaCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
        model: scale * k * (d_max as f64).powf(-b) / b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_sum_examples() {
        let c = restricted_power_sum_check(10, 1, 1, 1.0, 1.0).unwrap();
        assert!((c.exact - 165.0).abs() < 1e-12);
        assert!((c.main - 1000.0 / 6.0).abs() < 1e-9);
        assert!(c.deviation < 1.0);
        let c = restricted_power_sum_check(20, 20, 7, 1.5, 2.0).unwrap();
        assert!((c.exact - 7f64.powf(1.5) * 169.0).abs() < 1e-9);
        assert!(restricted_power_sum_check(10, 3, 4, 1.0, 1.0).is_err());
    }

    #[test]
    fn power_sum_deviation_stays_bounded() {
        for n in [100u64, 1000, 10_000] {
            let c = restricted_power_sum_check(n, 3, 2, 1.5, 2.5).unwrap();
            assert!(c.deviation <= 2.0, "n={n} {}", c.deviation);
        }
    }

    #[test]
    fn dirichlet_examples() {
        let c = dirichlet_identity_check(2.0, 2.0, 2000).unwrap();
        assert!(c.gap <= 5.0 / 2000.0);
        assert!(c.gap <= 5.0 * c.model);
        let c = dirichlet_identity_check(3.0, 4.0, 500).unwrap();
        assert!(c.gap <= 1e-4);
        let x = dirichlet_identity_check(2.5, 3.5, 200).unwrap();
        let y = dirichlet_identity_check(3.5, 2.5, 200).unwrap();
        assert!((x.lhs - y.lhs).abs() < 1e-14);
        assert!(dirichlet_identity_check(1.0, 2.0, 100).is_err());
    }

    #[test]
    fn hurwitz_sigma_examples() {
        let c = hurwitz_sigma_identity_check(1.0, 2.0, 6, 2000).unwrap();
        assert!(c.gap <= 1e-3 * c.rhs, "{c:?}");
        assert!(c.gap <= 5.0 * c.model, "{c:?}");
        let c = hurwitz_sigma_identity_check(-0.5, 2.0, 6, 1000).unwrap();
        assert!(c.gap <= 5.0 * c.model, "{c:?}");
        assert!(c.gap <= 1e-2 * c.rhs.abs(), "{c:?}");
        let c = hurwitz_sigma_identity_check(1.0, 2.0, 1, 500).unwrap();
        assert!(c.gap <= 5.0 * c.model);
    }
}
