use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("gamma function has a pole at {0}")]
    PoleOfGamma(Complex64),
    #[error("contour passes within {distance:e} of a pole ({what})")]
    PoleOnContour { what: String, distance: f64 },
    #[error("contour does not separate the pole families ({0})")]
    ContourSeparation(String),
    #[error("no convergence after {iterations} refinements in {what}")]
    NonConvergent { what: String, iterations: usize },
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),
    #[error("prefactor vanishes or is singular: {0}")]
    DegeneratePrefactor(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("argument outside the supported range: {0}")]
    RangeExceeded(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-finite value produced in {0}")]
    NotFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Reject NaN or infinite values before they are stored anywhere.
pub fn finite(z: Complex64, what: &str) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NotFinite(what.to_string()))
    }
}
