//! Ground-truth generators: classical closed-form Navier-Stokes solutions
//! with known Taylor coefficients, the analytic Gaussian Poisson pair for
//! the free-space solver, and seeded random band-limited initial data.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::backend::VectorField;
use crate::greensfn::FreeSpaceGrid;
use crate::num::{cst, Real};
use crate::trigpoly::TrigPoly;

/// Which closed-form flow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FlowKind<S> {
    /// 2-D Taylor-Green vortex `(-cos x sin y, sin x cos y, 0)`, velocity
    /// decay `exp(-2 nu t)`, steady under Euler.
    TaylorGreen2d,
    /// ABC Beltrami flow with unit wavenumber, velocity decay `exp(-nu t)`.
    AbcBeltrami { a: S, b: S, c: S },
}

/// A flow with a closed-form solution, used as validation ground truth.
#[derive(Clone, Copy, Debug)]
pub struct ExactFlow<S> {
    pub kind: FlowKind<S>,
    pub nu: S,
}

impl<S: Real> ExactFlow<S> {
    pub fn taylor_green(nu: S) -> Self {
        Self {
            kind: FlowKind::TaylorGreen2d,
            nu,
        }
    }

    pub fn abc(a: S, b: S, c: S, nu: S) -> Self {
        Self {
            kind: FlowKind::AbcBeltrami { a, b, c },
            nu,
        }
    }

    /// Velocity decay rate: `u(t) = u0 * exp(-decay_rate * t)`.
    /// Pressure decays at twice this rate.
    pub fn decay_rate(&self) -> S {
        match self.kind {
            FlowKind::TaylorGreen2d => cst::<S>(2.0) * self.nu,
            FlowKind::AbcBeltrami { .. } => self.nu,
        }
    }

    pub fn initial_velocity(&self) -> VectorField<TrigPoly<S>> {
        match self.kind {
            FlowKind::TaylorGreen2d => {
                let cos_x = TrigPoly::cosine([1, 0, 0], S::one());
                let sin_x = TrigPoly::sine([1, 0, 0], S::one());
                let cos_y = TrigPoly::cosine([0, 1, 0], S::one());
                let sin_y = TrigPoly::sine([0, 1, 0], S::one());
                VectorField::new(
                    cos_x.mul(&sin_y).scale(-S::one()),
                    sin_x.mul(&cos_y),
                    TrigPoly::zero(),
                )
            }
            FlowKind::AbcBeltrami { a, b, c } => VectorField::new(
                TrigPoly::sine([0, 0, 1], a).add(&TrigPoly::cosine([0, 1, 0], c)),
                TrigPoly::sine([1, 0, 0], b).add(&TrigPoly::cosine([0, 0, 1], a)),
                TrigPoly::sine([0, 1, 0], c).add(&TrigPoly::cosine([1, 0, 0], b)),
            ),
        }
    }

    /// Mean-zero initial pressure (the torus gauge of the recurrence).
    pub fn initial_pressure(&self) -> TrigPoly<S> {
        match self.kind {
            FlowKind::TaylorGreen2d => {
                let quarter = -S::one() / cst::<S>(4.0);
                TrigPoly::cosine([2, 0, 0], quarter).add(&TrigPoly::cosine([0, 2, 0], quarter))
            }
            FlowKind::AbcBeltrami { .. } => {
                // p0 = -(|u0|^2 - mean)/2
                let u0 = self.initial_velocity();
                let speed2 = u0.x.mul(&u0.x).add(&u0.y.mul(&u0.y)).add(&u0.z.mul(&u0.z));
                let mean = speed2.mean();
                speed2
                    .sub(&TrigPoly::constant(mean))
                    .scale(-S::one() / cst(2.0))
            }
        }
    }

    pub fn exact_velocity(&self, t: S) -> VectorField<TrigPoly<S>> {
        let factor = (-self.decay_rate() * t).exp();
        self.initial_velocity().scale(factor)
    }

    pub fn exact_pressure(&self, t: S) -> TrigPoly<S> {
        let factor = (-cst::<S>(2.0) * self.decay_rate() * t).exp();
        self.initial_pressure().scale(factor)
    }

    /// Closed-form Taylor coefficients: velocity `u0 * (-d)^n / n!`,
    /// pressure `p0 * (-2d)^n / n!` with `d` the decay rate.
    pub fn expected_coefficient(&self, n: usize) -> (VectorField<TrigPoly<S>>, TrigPoly<S>) {
        let d = self.decay_rate();
        let mut u_factor = S::one();
        let mut p_factor = S::one();
        for i in 1..=n {
            let inv = S::one() / S::from_usize(i).unwrap();
            u_factor *= -d * inv;
            p_factor *= -cst::<S>(2.0) * d * inv;
        }
        (
            self.initial_velocity().scale(u_factor),
            self.initial_pressure().scale(p_factor),
        )
    }
}

/// The analytic free-space Poisson pair: `p = exp(-r^2)`,
/// `phi = (6 - 4 r^2) exp(-r^2)` with `-laplacian(p) = phi` and zero total
/// integral.
pub fn gaussian_poisson_pair<S: Real>(
    half_width: S,
    n_per_axis: usize,
) -> (FreeSpaceGrid<S>, FreeSpaceGrid<S>) {
    let phi = FreeSpaceGrid::from_fn(half_width, n_per_axis, |x, y, z| {
        let r2 = x * x + y * y + z * z;
        (cst::<S>(6.0) - cst::<S>(4.0) * r2) * (-r2).exp()
    });
    let p = FreeSpaceGrid::from_fn(half_width, n_per_axis, |x, y, z| {
        (-(x * x + y * y + z * z)).exp()
    });
    (phi, p)
}

/// Seeded random band-limited divergence-free velocity field with modes in
/// `|k_i| <= k_max`, scaled to the requested max norm.
pub fn random_divergence_free<S: Real>(
    seed: u64,
    k_max: i32,
    amplitude: S,
) -> VectorField<TrigPoly<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut comps = [TrigPoly::zero(), TrigPoly::zero(), TrigPoly::zero()];
    for kx in -k_max..=k_max {
        for ky in -k_max..=k_max {
            for kz in -k_max..=k_max {
                let k = [kx, ky, kz];
                // One representative per conjugate pair.
                if k > [-kx, -ky, -kz] || k == [0, 0, 0] {
                    continue;
                }
                let mut c: Vec<Complex<S>> = (0..3)
                    .map(|_| {
                        Complex::new(
                            cst::<S>(rng.gen_range(-1.0..1.0)),
                            cst::<S>(rng.gen_range(-1.0..1.0)),
                        )
                    })
                    .collect();
                // Project out the component along k (incompressibility).
                let kf = [
                    S::from_i32(kx).unwrap(),
                    S::from_i32(ky).unwrap(),
                    S::from_i32(kz).unwrap(),
                ];
                let k2 = kf[0] * kf[0] + kf[1] * kf[1] + kf[2] * kf[2];
                let dot = c[0].scale(kf[0]) + c[1].scale(kf[1]) + c[2].scale(kf[2]);
                for a in 0..3 {
                    c[a] -= dot.scale(kf[a] / k2);
                }
                for a in 0..3 {
                    comps[a].add_harmonic(k, c[a]);
                }
            }
        }
    }
    let [x, y, z] = comps;
    let v = VectorField::new(x, y, z);
    let norm: S = v.max_norm();
    if norm > S::zero() {
        v.scale(amplitude / norm)
    } else {
        v
    }
}
