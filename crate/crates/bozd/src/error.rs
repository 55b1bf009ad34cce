//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the numerical routines.
///
/// Variants that correspond to a mathematically excluded situation (for
/// example [`Error::SingularB`]) signal a numerical breakdown rather than a
/// property of the problem.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Initial data failed validation; `index` names the offending pole or
    /// residue (zero-based).
    #[error("invalid initial data at index {index}: {reason}")]
    InvalidData { index: usize, reason: String },

    /// A configuration value is out of its admissible range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An operation that evaluates `h` was called with `t <= 0`.
    #[error("time must be strictly positive, got t = {0}")]
    NonPositiveTime(f64),

    /// A rational function was evaluated too close to one of its poles.
    #[error("evaluation point {re}+{im}i is within tolerance of a pole")]
    PoleHit { re: f64, im: f64 },

    /// `(t, x)` is too close to the discriminant locus for a reliable
    /// classification of the characteristic roots.
    #[error("(t, x) = ({t}, {x}) is too close to the discriminant locus (root separation {separation:e})")]
    NearCaustic { t: f64, x: f64, separation: f64 },

    /// Simultaneous iteration or Newton polishing did not converge.
    #[error("polynomial root finding failed: {0}")]
    RootFindingFailure(String),

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    /// The modulation matrix is numerically singular.
    #[error("modulation matrix is numerically singular (|det| = {0:e})")]
    SingularM(f64),

    /// The modulus formula produced a non-positive value, which indicates a
    /// branch mis-ordering upstream.
    #[error("modulus squared for phase {index} is not positive ({value:e})")]
    NonPositiveModulus { index: usize, value: f64 },

    /// A saddle used to seed a steepest-descent trace is degenerate.
    #[error("degenerate saddle: |h''| = {0:e}")]
    DegenerateSaddle(f64),

    /// A trajectory trace exhausted its arc-length budget.
    #[error("trajectory trace exceeded its arc-length budget ({0})")]
    BudgetExceeded(String),

    /// Automatic contour construction failed validation.
    #[error("contour construction failed: {0}")]
    ContourConstructionFailure(String),

    /// The denominator determinant of the exact solution vanished numerically.
    #[error("denominator determinant is numerically zero")]
    SingularB,

    /// The resolvent in the soliton formula is numerically singular.
    #[error("soliton resolvent is numerically singular")]
    SingularResolvent,

    /// Too few data points for a fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The L² check requires `J <= 1` everywhere on the window.
    #[error("J = {j} found at x = {x}; the L2 check requires J <= 1")]
    JTooLarge { j: usize, x: f64 },

    /// Reading or parsing an input document failed.
    #[error("input error: {0}")]
    Input(String),
}
