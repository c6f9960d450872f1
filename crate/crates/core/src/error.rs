//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by field arithmetic and the Poisson solvers.
#[derive(Debug, Error)]
pub enum FieldError {
    #[error("grid specifications do not match: {0}")]
    GridMismatch(String),

    #[error("invalid grid specification: {0}")]
    InvalidGrid(String),

    #[error("field contains non-finite values")]
    NonFinite,

    #[error(
        "Poisson source is incompatible (mean {mean:e} exceeds tolerance {tol:e} \
         relative to max norm)"
    )]
    IncompatibleSource { mean: f64, tol: f64 },

    #[error("mode support (max wavenumber {kmax}) exceeds grid Nyquist limit {nyquist}")]
    ResolutionExceeded { kmax: i32, nyquist: i32 },
}

/// Errors raised by the order-by-order recurrence.
#[derive(Debug, Error)]
pub enum RecurrenceError {
    #[error("order {requested} cannot be advanced: {available} orders available")]
    MissingLowerOrders { requested: usize, available: usize },

    #[error(
        "divergence {value:e} of order {order} exceeds tolerance {tol:e}; \
         resolution, dealiasing, or sign failure"
    )]
    DivergenceExceeded { order: usize, value: f64, tol: f64 },

    #[error("initial velocity has divergence {div:e}, above tolerance {tol:e}")]
    InitialNotDivergenceFree { div: f64, tol: f64 },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Errors raised by series evaluation and diagnostics.
#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("requested order {requested} exceeds available truncation {available}")]
    OrderOutOfRange { requested: usize, available: usize },

    #[error("fewer than {needed} usable coefficient norms ({found} found)")]
    InsufficientData { needed: usize, found: usize },
}

/// Errors raised while reading or writing dump files.
#[derive(Debug, Error)]
pub enum DumpError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed dump: {0}")]
    Malformed(String),
}
