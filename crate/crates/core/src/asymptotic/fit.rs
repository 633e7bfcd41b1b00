use rayon::prelude::*;

use crate::convolution::{s_ab_values_in, ExponentPair};
use crate::real::{Precise, Real};
use crate::{Error, Result};

use super::{expand_in, predicted_error_exponent, ApproxConfig};

/// One grid point of an error-exponent experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct FitPoint {
    pub n: u64,
    pub s_exact: f64,
    pub approx: f64,
    /// `S_exact − approx`, evaluated before rounding to `f64`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub predicted: f64,
    pub points: Vec<FitPoint>,
}

/// `count` integers spaced geometrically from `lo` to `hi`, deduplicated.
pub fn geometric_grid(lo: u64, hi: u64, count: usize) -> Vec<u64> {
    if count < 2 || lo >= hi {
        return vec![lo];
    }
    let ratio = (hi as f64 / lo as f64).ln() / (count - 1) as f64;
    let mut grid: Vec<u64> = (0..count)
        .map(|i| (lo as f64 * (ratio * i as f64).exp()).round() as u64)
        .collect();
    grid.dedup();
    grid
}

/// Least-squares line through `(ln x, ln |y|)` for nonzero `y`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(_, y)| **y != 0.0)
        .map(|(x, y)| (x.ln(), y.abs().ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::TooFewPoints {
            usable: pts.len(),
            needed: 4,
        });
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Fits `log |S_{a,b}(n) − approx(n)|` against `log n`.
///
/// Everything is evaluated in [`Precise`] so that residuals many orders below
/// `S_{a,b}(n)` survive; a residual within a few ulps of that precision counts as
/// an exact zero and is skipped.
pub fn error_exponent_fit(a: f64, b: f64, grid: &[u64], cfg: &ApproxConfig) -> Result<FitResult> {
    let pair = ExponentPair::new(a, b)?;
    if grid.len() < 8 || grid.iter().any(|&n| n < 64) {
        return Err(Error::InvalidArgument(
            "grid needs at least 8 values, each at least 64".into(),
        ));
    }
    let exact: Vec<Precise> = s_ab_values_in(a, b, grid)?;
    let expansions = grid
        .par_iter()
        .map(|&n| expand_in::<Precise>(a, b, n, cfg))
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<FitPoint> = grid
        .iter()
        .zip(exact)
        .zip(expansions)
        .map(|((&n, s), e)| {
            let r = s.clone() - e.approx.clone();
            let noise = 64.0 * Precise::EPSILON * s.to_f64().abs();
            let residual = if r.to_f64().abs() <= noise { 0.0 } else { r.to_f64() };
            FitPoint {
                n,
                s_exact: s.to_f64(),
                approx: e.approx.to_f64(),
                residual,
            }
        })
        .collect();
    let xs: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.residual).collect();
    let (slope, intercept) = fit_power_law(&xs, &ys)?;
    Ok(FitResult {
        slope,
        intercept,
        predicted: predicted_error_exponent(&pair),
        points,
    })
}
