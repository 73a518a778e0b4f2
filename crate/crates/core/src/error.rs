use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, IbcError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IbcError {
    #[error("coupling constant is zero: the free vacuum limit is not representable")]
    ZeroCoupling,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no sign change on bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("root finder did not converge after {iterations} iterations (best estimate {best})")]
    RootNotConverged { iterations: usize, best: f64 },
    #[error("quadrature did not reach tolerance: estimate {estimate} with error {error:e}")]
    QuadratureNotConverged { estimate: Complex64, error: f64 },
    #[error("erfc overflows at z = {0}")]
    Overflow(Complex64),
    #[error("no negative-energy bound state exists for this configuration")]
    NoBoundState,
    #[error("resonance denominator vanishes at k = {0}")]
    ResonanceDenominator(f64),
    #[error("energy {energy} lies within {distance:e} of an eigenvalue")]
    NearEigenvalue { energy: f64, distance: f64 },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("energy {0} is not an eigenvalue of the secular system")]
    NotAnEigenvalue(f64),
    #[error("degenerate nullspace of dimension {0}")]
    DegenerateNullspace(usize),
    #[error("linear solve failed: {0}")]
    LinearSolve(String),
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
}
