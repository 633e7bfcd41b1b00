use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("limit {limit} outside supported range {min}..={max}")]
    LimitOutOfRange { limit: u64, min: u64, max: u64 },

    #[error("argument {n} outside table range 1..={limit}")]
    OutOfRange { n: u64, limit: u64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("table exponent {table} does not match requested exponent {requested}")]
    ExponentMismatch { table: f64, requested: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Bernoulli index {index} exceeds cache limit {max}")]
    BernoulliIndex { index: usize, max: usize },

    #[error("pole of zeta at s = 1")]
    Pole,

    #[error("Euler-Maclaurin could not reach tolerance {target:e} at s = {s}, x = {x} (best estimate {achieved:e})")]
    Precision {
        s: f64,
        x: f64,
        target: f64,
        achieved: f64,
    },

    #[error("regime error: {0}")]
    Regime(String),

    #[error("residue sum at m = {m} does not converge: need m < {bound}")]
    Divergent { m: u32, bound: f64 },

    #[error("residue tail estimate {tail:e} exceeds tolerance {allowed:e} at d_max = {d_max}")]
    Tail { tail: f64, allowed: f64, d_max: u64 },

    #[error("not enough usable points for a fit: {usable} (need {needed})")]
    TooFewPoints { usable: usize, needed: usize },

    #[error("identity check failed: {0}")]
    Identity(String),

    #[error("non-integral value at n = {n}: {value}")]
    NonIntegral { n: u64, value: String },
}
