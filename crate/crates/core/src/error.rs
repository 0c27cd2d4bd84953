//! Error type shared by all modules.

use thiserror::Error;

/// Errors raised by constructors, measures, and solvers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Matrix is not Hermitian within tolerance.
    #[error("not Hermitian: max |ρ - ρ†| element = {deviation:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    /// Trace differs from one.
    #[error("trace is not 1: |tr - 1| = {deviation:.3e} exceeds {tolerance:.1e}")]
    NotUnitTrace { deviation: f64, tolerance: f64 },

    /// Negative eigenvalue beyond tolerance.
    #[error("not positive semidefinite: min eigenvalue = {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },

    /// Operation requires different subsystem dimensions.
    #[error("wrong dimension: expected {expected}, got {got}")]
    WrongDimension { expected: String, got: String },

    /// Measurement operators fail POVM requirements.
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    /// Scalar argument outside its admissible range.
    #[error("domain error: {0}")]
    DomainError(String),

    /// Steering solver cannot handle the requested scenario.
    #[error("unsupported scenario: {0}")]
    UnsupportedScenario(String),

    /// Steering-party marginal too close to pure for ellipsoid formulas.
    #[error("singular marginal: steering party has a² = {a_squared:.12} (limit 1 - 1e-9)")]
    SingularMarginal { a_squared: f64 },

    /// POVM element with vanishing outcome probability.
    #[error("degenerate outcome: probability {probability:.3e} too small")]
    DegenerateOutcome { probability: f64 },

    /// Unknown catalog identifier.
    #[error("unknown catalog id: {0}")]
    UnknownId(String),

    /// Catalog parameters outside documented ranges.
    #[error("bad parameters: {0}")]
    BadParams(String),

    /// Sweep grid is empty or outside the validity region.
    #[error("bad grid: {0}")]
    BadGrid(String),

    /// File or JSON input could not be parsed.
    #[error("parse error: {0}")]
    ParseError(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
