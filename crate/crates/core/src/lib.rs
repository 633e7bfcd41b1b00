//! Exact and asymptotic evaluation of additive divisor-function convolutions
//!
//! `S_{a,b}(n) = Σ_{k=1}^{n-1} σ_a(k) σ_b(n-k)` is computed exactly (integer
//! exponents) or with compensated floating sums (real exponents), and compared
//! against its multi-term asymptotic expansion: the main term, the secondary
//! term, and the residue terms coming from the poles of the gamma factor.
//!
//! Supporting pieces:
//!
//! * [`arith`]: factor sieve, σ_a, Möbius, Jordan totient, Dirichlet convolution.
//! * [`special`]: exact Bernoulli numbers, log-gamma, Hurwitz and Riemann zeta.
//! * [`kloosterman`]: classical and twisted Kloosterman sums, Weil bound checks.
//! * [`sts`]: the count `D(n)` of primitive three-cylinder square-tiled surfaces
//!   in `H(1,1)` and its density experiment.
//!
//! Numeric kernels are written once against [`Real`], which is implemented for
//! `f64` and for the 192-bit [`Precise`] type used when residuals are many
//! orders of magnitude below the terms they are measured against.

pub mod arith;
pub mod asymptotic;
pub mod convolution;
mod error;
pub mod kloosterman;
mod real;
pub mod special;
pub mod sts;
pub mod sum;

pub use error::{Error, Result};
pub use real::{Precise, Real, PRECISE_BITS};
