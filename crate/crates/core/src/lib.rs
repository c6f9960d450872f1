//! Time-Taylor-series solver for the incompressible Navier-Stokes and
//! Euler equations on a periodic box.
//!
//! The velocity and pressure are expanded as power series in time; each
//! order is obtained from the lower ones by solving a pressure Poisson
//! equation and evaluating the momentum recurrence. Two interchangeable
//! backends carry the spatial fields:
//!
//! * [`trigpoly::TrigPoly`] — exact finite Fourier sums, alias-free by
//!   construction (the oracle backend);
//! * [`field::GridField`] — sampled fields with FFT calculus and dealiased
//!   products (the production backend).
//!
//! [`greensfn`] solves the pressure Poisson problem on free space by direct
//! quadrature of the Newtonian potential, cross-validating the periodic
//! solve. [`series`] evaluates partial sums, residuals, and empirical
//! radius-of-convergence diagnostics; convergence of the series is an open
//! question and is only probed, never claimed.

pub mod backend;
pub mod error;
pub mod fft;
pub mod field;
pub mod greensfn;
pub mod num;
pub mod oracle;
pub mod recurrence;
pub mod series;
pub mod trigpoly;

pub use backend::{divergence, gradient, Axis, ScalarField, VectorField};
pub use error::{DumpError, FieldError, RecurrenceError, SeriesError};
pub use num::Real;

// Concrete scalar instantiations.
pub type TrigPoly64 = trigpoly::TrigPoly<f64>;
pub type TrigPoly32 = trigpoly::TrigPoly<f32>;
pub type GridSpec64 = field::GridSpec<f64>;
pub type GridField64 = field::GridField<f64>;
pub type FreeSpaceGrid64 = greensfn::FreeSpaceGrid<f64>;
pub type VectorTrigPoly64 = VectorField<TrigPoly64>;
pub type VectorGridField64 = VectorField<GridField64>;
pub type Problem64<F> = recurrence::Problem<f64, F>;
pub type TaylorCoefficients64<F> = recurrence::TaylorCoefficients<f64, F>;
