use thiserror::Error;

use crate::Point;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("point ({x}, {y}) lies outside the sampled region", x = .0[0], y = .0[1])]
    OutsideRegion(Point),

    #[error("sample region does not cover the requested box: {0}")]
    InsufficientRegion(String),

    #[error("scale {scale} needs {requested} coefficients, above the cap of {cap}")]
    MemoryCap { scale: usize, requested: usize, cap: usize },

    #[error("argument {re}{im:+}i is within {distance:e} of a pole")]
    PoleProximity { re: f64, im: f64, distance: f64 },

    #[error("quadrature did not converge on [{a}, {b}] (estimate error {error:e})")]
    Quadrature { a: f64, b: f64, error: f64 },

    #[error("ζ = 0 is a logarithmic singularity of U(a, 1; ζ)")]
    ZeroArgument,

    #[error("matrix of dimension {dim} exceeds the dense cap {cap}")]
    DenseCap { dim: usize, cap: usize },

    #[error("assembled operator is not Hermitian (max defect {0:e})")]
    NonHermitian(f64),

    #[error("shift {shift} is within {distance:e} of the spectrum")]
    NearSingular { shift: f64, distance: f64 },

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
