//! Common surface over the two field backends.
//!
//! The recurrence, series, and oracle modules are written once against
//! [`ScalarField`]; the trig-polynomial and grid backends both implement it.

use crate::error::FieldError;
use crate::num::Real;

/// Coordinate axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X = 0,
    Y = 1,
    Z = 2,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// A real scalar field on a periodic domain supporting spectral calculus.
///
/// `add`/`sub`/`mul` panic when the operands live on different grids; the
/// fallible entry points on the concrete types report that as an error.
pub trait ScalarField<S: Real>: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn scale(&self, c: S) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn derivative(&self, axis: Axis) -> Self;
    fn laplacian(&self) -> Self;

    /// Solve `laplacian(p) = self` with mean-zero gauge.
    fn poisson_inverse(&self) -> Result<Self, FieldError>;

    fn mean(&self) -> S;
    fn max_norm(&self) -> S;
    fn mean_square(&self) -> S;
    fn domain_volume(&self) -> S;

    /// Largest per-axis wavenumber magnitude carrying meaningful content
    /// (relative threshold on the spectrum); 0 for constant or zero fields.
    fn band_limit(&self) -> usize;

    /// Zero every mode with any `|k_i| > kmax`.
    ///
    /// For band-limited initial data of support `k0`, order `n` of the
    /// recurrence can only occupy `|k_i| <= k0*(n+1)`; content outside that
    /// band is roundoff noise, and the Taylor coefficients of strongly
    /// damped modes grow like `(nu*k^2)^n / n!`, so leaving the noise in
    /// place destroys high orders on grid backends.
    fn truncate_band(&self, kmax: usize) -> Self;

    /// Term count (trig polynomials) or grid point count.
    fn dof_count(&self) -> usize;

    /// Default per-order divergence tolerance for this backend.
    fn default_tol_div() -> S;
}

/// Three scalar components sharing one domain.
#[derive(Clone, Debug)]
pub struct VectorField<F> {
    pub x: F,
    pub y: F,
    pub z: F,
}

impl<F> VectorField<F> {
    pub fn new(x: F, y: F, z: F) -> Self {
        Self { x, y, z }
    }

    pub fn component(&self, axis: Axis) -> &F {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
            Axis::Z => &self.z,
        }
    }

    pub fn map<G>(&self, mut f: impl FnMut(&F) -> G) -> VectorField<G> {
        VectorField::new(f(&self.x), f(&self.y), f(&self.z))
    }
}

impl<F> VectorField<F> {
    pub fn zero_like<S: Real>(&self) -> Self
    where
        F: ScalarField<S>,
    {
        self.map(|c| c.zero_like())
    }

    pub fn add<S: Real>(&self, other: &Self) -> Self
    where
        F: ScalarField<S>,
    {
        VectorField::new(
            self.x.add(&other.x),
            self.y.add(&other.y),
            self.z.add(&other.z),
        )
    }

    pub fn sub<S: Real>(&self, other: &Self) -> Self
    where
        F: ScalarField<S>,
    {
        VectorField::new(
            self.x.sub(&other.x),
            self.y.sub(&other.y),
            self.z.sub(&other.z),
        )
    }

    pub fn scale<S: Real>(&self, c: S) -> Self
    where
        F: ScalarField<S>,
    {
        self.map(|f| f.scale(c))
    }

    pub fn max_norm<S: Real>(&self) -> S
    where
        F: ScalarField<S>,
    {
        self.x.max_norm().max(self.y.max_norm()).max(self.z.max_norm())
    }
}

/// `du/dx + dv/dy + dw/dz`
pub fn divergence<S: Real, F: ScalarField<S>>(v: &VectorField<F>) -> F {
    v.x.derivative(Axis::X)
        .add(&v.y.derivative(Axis::Y))
        .add(&v.z.derivative(Axis::Z))
}

/// `(df/dx, df/dy, df/dz)`
pub fn gradient<S: Real, F: ScalarField<S>>(f: &F) -> VectorField<F> {
    VectorField::new(
        f.derivative(Axis::X),
        f.derivative(Axis::Y),
        f.derivative(Axis::Z),
    )
}

/// `(a . grad) b`, the advection of component field `b` by `a`.
pub fn advect<S: Real, F: ScalarField<S>>(a: &VectorField<F>, b: &F) -> F {
    a.x.mul(&b.derivative(Axis::X))
        .add(&a.y.mul(&b.derivative(Axis::Y)))
        .add(&a.z.mul(&b.derivative(Axis::Z)))
}
