use thiserror::Error;

/// Errors raised by the algebra, geometry and certification routines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("attempted to invert a quaternion of modulus {modulus:e}")]
    ZeroDivisor { modulus: f64 },

    #[error("point of modulus {modulus} lies outside the domain of radius {radius}")]
    Domain { modulus: f64, radius: f64 },

    #[error("series radii differ: {left} vs {right}")]
    RadiusMismatch { left: f64, right: f64 },

    #[error("series with constant term of modulus {modulus:e} has no regular reciprocal")]
    NonInvertible { modulus: f64 },

    #[error("spherical derivative is undefined at the real point {x}")]
    RealPoint { x: f64 },

    #[error("division by (q - q0) leaves a remainder of modulus {remainder:e}")]
    NonzeroRemainder { remainder: f64 },

    #[error("series vanishes identically on the sphere x = {x}, y = {y}")]
    Degenerate { x: f64, y: f64 },

    #[error("pole: denominator of modulus {modulus:e}")]
    Pole { modulus: f64 },

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("series was truncated at the order cap; pass allow_truncated to use it")]
    Truncated,

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
