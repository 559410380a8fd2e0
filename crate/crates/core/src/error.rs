//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("denominator mismatch: qden {left} vs {right}")]
    DenominatorMismatch { left: i64, right: i64 },

    #[error("inexact division at scaled q-exponent {qexp}")]
    InexactDivision { qexp: i64 },

    #[error("division by zero series")]
    DivisionByZero,

    #[error("beyond truncation: scaled q-exponent {requested} exceeds window {trunc}")]
    BeyondTruncation { requested: i64, trunc: i64 },

    #[error("window too small: need scaled q-order {needed}, have {available}")]
    WindowTooSmall { needed: i64, available: i64 },

    #[error("result window is unbounded; pass an explicit truncation")]
    UnboundedWindow,

    #[error("malformed factor: {0}")]
    MalformedFactor(String),

    #[error("fractional exponents: {0}")]
    FractionalExponent(String),

    #[error("cannot rescale: exponent {exp}/{qden} not representable with denominator {new_qden}")]
    IncompatibleDenominator { exp: i64, qden: i64, new_qden: i64 },

    #[error("not integral order: u + 3*ell = {v24} is not divisible by 24")]
    NotIntegralOrder { v24: i64 },

    #[error("ell + u = {0} is odd, weight would be half-integral")]
    OddWeight(i64),

    #[error("theta denominator not supported: exponent of theta_{ell} is {exponent} < 0")]
    ThetaDenominator { ell: i64, exponent: i64 },

    #[error("eisenstein term undefined: c(0,0) != 0 but weight {k} is odd or < 4")]
    EisensteinBranch { k: i64 },

    #[error("non-integral coefficient where an integer is required: {0}")]
    NonIntegralCoefficient(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("zero series has no support")]
    ZeroSeries,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
