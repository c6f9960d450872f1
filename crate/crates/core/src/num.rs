//! Scalar abstraction for the numerical core.
//!
//! Everything in this crate is generic over [`Real`], which any IEEE float
//! type usable with `rustfft` satisfies. Concrete aliases for `f32`/`f64`
//! live at the crate root.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar usable for both the exact trig-polynomial algebra
/// and the FFT-backed grid operations.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + FftNum
    + Display
    + LowerExp
    + Debug
    + Send
    + Sync
    + 'static
{
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("f64 not representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for embedding an `f64` literal into a generic scalar.
pub fn cst<S: Real>(x: f64) -> S {
    S::from_f64_lossy(x)
}

/// Scale a tolerance stated for `f64` to the precision of `S`.
///
/// For `f64` this returns the value unchanged; for `f32` the tolerance is
/// widened in proportion to the machine epsilon ratio, so the same contract
/// remains meaningful in single precision.
pub fn tol<S: Real>(f64_tol: f64) -> S {
    let scale = S::epsilon().to_f64().unwrap_or(f64::EPSILON) / f64::EPSILON;
    S::from_f64_lossy(f64_tol * scale)
}
