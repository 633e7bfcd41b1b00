//! Special functions of a real argument.
//!
//! Bernoulli numbers are exact rationals. The gamma family uses a shifted
//! Stirling series and the Hurwitz zeta function is evaluated by Euler–Maclaurin
//! summation for every real `s != 1`, including `s < 0`. Each numeric routine has
//! a generic `*_in` form over [`Real`](crate::Real) and an `f64` convenience form.

mod bernoulli;
mod gamma;
mod zeta;

pub use bernoulli::{
    bernoulli_number, bernoulli_poly, bernoulli_poly_coeffs, bernoulli_poly_exact, bernoulli_poly_in,
    zeta_neg_int, zeta_neg_int_f64, BERNOULLI_MAX,
};
pub use gamma::{
    beta_factor, beta_factor_in, binom_real, binom_real_in, gamma_real, gamma_real_in, log_gamma,
    log_gamma_in,
};
pub use zeta::{
    hurwitz_zeta, hurwitz_zeta_in, riemann_zeta, riemann_zeta_in, PrecisionProfile, EM_MAX_TERMS,
};
