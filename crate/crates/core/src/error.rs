use thiserror::Error;

/// Errors raised by the numerical kernel and the model layers built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("matrix is not Hermitian (relative deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is singular (smallest eigenvalue {min_eigenvalue:e})")]
    SingularMatrix { min_eigenvalue: f64 },
    #[error("matrix is rank deficient (smallest eigenvalue of Z†Z is {min_eigenvalue:e})")]
    RankDeficient { min_eigenvalue: f64 },
    #[error("non-finite entry in matrix")]
    NonFinite,
    #[error("invalid domain dimensions: {0}")]
    InvalidDimensions(&'static str),
    #[error("matrix violates the {0} symmetry of the domain")]
    StructureViolation(&'static str),
    #[error("point lies outside the closed domain (eigenvalue {eigenvalue:e} of Id - zz†)")]
    OutsideClosure { eigenvalue: f64 },
    #[error("odd nullity {nullity} of Id - zz† for an antisymmetric matrix")]
    OddNullity { nullity: usize },
    #[error("matrix is not in canonical form (leading block deviates by {deviation:e})")]
    NotCanonical { deviation: f64 },
    #[error("point lies in the open domain, not on a boundary component")]
    NotOnBoundary,
    #[error("boundary component has no residual block")]
    NoResidualBlock,
    #[error("constraint violated: {block}: {condition} (deviation {deviation:e})")]
    ConstraintViolation {
        block: &'static str,
        condition: &'static str,
        deviation: f64,
    },
    #[error("denominator Cz + D is singular (smallest singular value {sigma_min:e})")]
    SingularDenominator { sigma_min: f64 },
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("scalar state violates the {0}")]
    DomainViolation(&'static str),
    #[error("oscillators lie on different boundary components")]
    MixedComponents,
    #[error("oscillator {index} is {distance:e} away from the boundary, too far to retract")]
    TooFarToRetract { index: usize, distance: f64 },
    #[error("divergence detected at t = {time} for oscillator {index} (norm {norm:e})")]
    DivergenceDetected { time: f64, index: usize, norm: f64 },
    #[error("invalid integration config: {0}")]
    InvalidConfig(&'static str),
    #[error("invalid initial state: {0}")]
    InvalidInitialState(&'static str),
    #[error("adaptive step size underflow at t = {time}")]
    StepSizeUnderflow { time: f64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
