use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polynomial has no nonzero coefficient")]
    ZeroPolynomial,

    #[error("operation requires degree >= {required}, got {actual}")]
    DegreeTooLow { required: usize, actual: usize },

    #[error("leading coefficient is zero")]
    ZeroLeadingCoefficient,

    #[error("root finder did not converge after {iterations} iterations (max residual {max_residual:e})")]
    RootsNotConverged { iterations: usize, max_residual: f64 },

    #[error("bracket invalid: f({lo}) = {f_lo:e} and f({hi}) = {f_hi:e} have the same sign")]
    BracketInvalid { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("boundary angle {0} lies on a sector boundary")]
    BoundaryAngle(f64),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("no real roots: {0}")]
    NoRealRoots(String),

    #[error("inconsistent parameter system: {0}")]
    Inconsistent(String),

    #[error("branch ambiguity: path passes within {distance:e} of zero {zero_index}")]
    BranchAmbiguity { zero_index: usize, distance: f64 },

    #[error("branch/arc mismatch: {0}")]
    BranchArcMismatch(String),

    #[error("quadratic differential zeros do not reproduce Q (max coefficient error {0:e})")]
    ZeroFactorizationMismatch(f64),

    #[error("truncation bound unreachable within radius {0}")]
    TruncationUnreachable(f64),

    #[error("panel subdivision limit reached (worst panel [{worst_start}, {worst_end}] error {worst_error:e})")]
    SubdivisionLimit {
        worst_start: String,
        worst_end: String,
        worst_error: f64,
    },

    #[error("increase precision: moment matrix singular to working precision (pivot {pivot:e} at column {column})")]
    IncreasePrecision { column: usize, pivot: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),
}
