//! Periodic-box fields with spectral calculus.
//!
//! A [`GridField`] stores real point values on a uniform periodic grid in
//! x-fastest order. Derivatives, the Laplacian, and the torus Poisson solve
//! are spectral and therefore exact for band-limited data; products are
//! dealiased according to the grid's [`DealiasRule`].

pub mod io;

use num_complex::Complex;

use crate::backend::{Axis, ScalarField, VectorField};
use crate::error::FieldError;
use crate::fft;
use crate::num::{cst, tol, Real};
use crate::trigpoly::TrigPoly;

/// How pointwise products are protected against aliasing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DealiasRule {
    /// Orszag 2/3 rule: truncate modes above `n/3` before and after products.
    TwoThirds,
    /// Zero-pad to double resolution around each product; alias-free whenever
    /// the true product support fits the original grid.
    ExactPadding,
}

/// Solvability tolerance for the torus Poisson solve, relative to the
/// source's max norm.
pub fn default_tol_mean<S: Real>() -> S {
    tol(1e-10)
}

/// Uniform periodic grid: point counts, box lengths, dealias rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec<S: Real> {
    nx: usize,
    ny: usize,
    nz: usize,
    lx: S,
    ly: S,
    lz: S,
    pub dealias: DealiasRule,
}

impl<S: Real> GridSpec<S> {
    pub fn new(
        nx: usize,
        ny: usize,
        nz: usize,
        lx: S,
        ly: S,
        lz: S,
        dealias: DealiasRule,
    ) -> Result<Self, FieldError> {
        for (n, name) in [(nx, "nx"), (ny, "ny"), (nz, "nz")] {
            if n < 4 || n % 2 != 0 {
                return Err(FieldError::InvalidGrid(format!(
                    "{name} = {n}; point counts must be even and at least 4"
                )));
            }
        }
        for (l, name) in [(lx, "Lx"), (ly, "Ly"), (lz, "Lz")] {
            if !(l > S::zero()) || !l.is_finite() {
                return Err(FieldError::InvalidGrid(format!(
                    "{name} = {l}; box lengths must be positive and finite"
                )));
            }
        }
        Ok(Self {
            nx,
            ny,
            nz,
            lx,
            ly,
            lz,
            dealias,
        })
    }

    /// Cubic `(2*pi)^3` box, the default domain.
    pub fn cubic(n: usize, dealias: DealiasRule) -> Result<Self, FieldError> {
        let two_pi = S::PI() * cst(2.0);
        Self::new(n, n, n, two_pi, two_pi, two_pi, dealias)
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn lengths(&self) -> [S; 3] {
        [self.lx, self.ly, self.lz]
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn volume(&self) -> S {
        self.lx * self.ly * self.lz
    }

    /// Physical wavenumber factor `2*pi/L` per axis.
    fn k_scale(&self) -> [S; 3] {
        let two_pi = S::PI() * cst(2.0);
        [two_pi / self.lx, two_pi / self.ly, two_pi / self.lz]
    }

    fn check_match(&self, other: &Self) -> Result<(), FieldError> {
        if self != other {
            return Err(FieldError::GridMismatch(format!(
                "{:?} vs {:?}",
                self, other
            )));
        }
        Ok(())
    }
}

/// Real scalar field sampled on a [`GridSpec`].
#[derive(Clone, Debug)]
pub struct GridField<S: Real> {
    spec: GridSpec<S>,
    values: Vec<S>,
}

impl<S: Real> GridField<S> {
    pub fn zeros(spec: GridSpec<S>) -> Self {
        let values = vec![S::zero(); spec.len()];
        Self { spec, values }
    }

    pub fn from_values(spec: GridSpec<S>, values: Vec<S>) -> Result<Self, FieldError> {
        if values.len() != spec.len() {
            return Err(FieldError::InvalidGrid(format!(
                "value count {} does not match grid size {}",
                values.len(),
                spec.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FieldError::NonFinite);
        }
        Ok(Self { spec, values })
    }

    /// Sample a function of physical coordinates.
    pub fn from_fn(spec: GridSpec<S>, mut f: impl FnMut(S, S, S) -> S) -> Self {
        let [nx, ny, nz] = spec.dims();
        let [lx, ly, lz] = spec.lengths();
        let mut values = Vec::with_capacity(spec.len());
        for iz in 0..nz {
            let z = lz * S::from_usize(iz).unwrap() / S::from_usize(nz).unwrap();
            for iy in 0..ny {
                let y = ly * S::from_usize(iy).unwrap() / S::from_usize(ny).unwrap();
                for ix in 0..nx {
                    let x = lx * S::from_usize(ix).unwrap() / S::from_usize(nx).unwrap();
                    values.push(f(x, y, z));
                }
            }
        }
        Self { spec, values }
    }

    pub fn spec(&self) -> &GridSpec<S> {
        &self.spec
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// Mode coefficients of `exp(i k . x)`, FFT index order.
    pub fn spectrum(&self) -> Vec<Complex<S>> {
        let mut data: Vec<Complex<S>> = self
            .values
            .iter()
            .map(|&v| Complex::new(v, S::zero()))
            .collect();
        fft::forward(&mut data, self.spec.dims());
        data
    }

    fn from_spectrum(spec: GridSpec<S>, mut data: Vec<Complex<S>>) -> Self {
        fft::inverse(&mut data, spec.dims());
        let values = data.into_iter().map(|c| c.re).collect();
        Self { spec, values }
    }

    /// Apply a per-mode multiplier `g([kx,ky,kz]_phys_index)` in place.
    fn map_modes(&self, mut g: impl FnMut([i64; 3]) -> Complex<S>) -> Self {
        let [nx, ny, nz] = self.spec.dims();
        let mut data = self.spectrum();
        for iz in 0..nz {
            let kz = fft::wavenumber(iz, nz);
            for iy in 0..ny {
                let ky = fft::wavenumber(iy, ny);
                for ix in 0..nx {
                    let kx = fft::wavenumber(ix, nx);
                    let idx = ix + nx * (iy + ny * iz);
                    data[idx] *= g([kx, ky, kz]);
                }
            }
        }
        Self::from_spectrum(self.spec, data)
    }

    /// Spectral derivative along an axis; exact for band-limited data.
    /// The Nyquist mode has no well-defined odd derivative and is zeroed.
    pub fn derivative(&self, axis: Axis) -> Self {
        let a = axis as usize;
        let n_axis = self.spec.dims()[a];
        let scale = self.spec.k_scale()[a];
        self.map_modes(|k| {
            if k[a].unsigned_abs() as usize == n_axis / 2 {
                Complex::new(S::zero(), S::zero())
            } else {
                Complex::new(S::zero(), scale * S::from_i64(k[a]).unwrap())
            }
        })
    }

    /// Spectral Laplacian: multiply each mode by `-|k|^2`.
    pub fn laplacian(&self) -> Self {
        let ks = self.spec.k_scale();
        self.map_modes(|k| {
            let mut k2 = S::zero();
            for a in 0..3 {
                let ka = ks[a] * S::from_i64(k[a]).unwrap();
                k2 += ka * ka;
            }
            Complex::new(-k2, S::zero())
        })
    }

    fn two_thirds_mask(&self) -> Self {
        let [nx, ny, nz] = self.spec.dims();
        let cut = [nx as i64 / 3, ny as i64 / 3, nz as i64 / 3];
        self.map_modes(|k| {
            if k[0].abs() <= cut[0] && k[1].abs() <= cut[1] && k[2].abs() <= cut[2] {
                Complex::new(S::one(), S::zero())
            } else {
                Complex::new(S::zero(), S::zero())
            }
        })
    }

    /// Pointwise product, dealiased per the grid's rule.
    pub fn multiply(&self, other: &Self) -> Result<Self, FieldError> {
        self.spec.check_match(&other.spec)?;
        match self.spec.dealias {
            DealiasRule::TwoThirds => {
                let a = self.two_thirds_mask();
                let b = other.two_thirds_mask();
                let values = a
                    .values
                    .iter()
                    .zip(&b.values)
                    .map(|(&x, &y)| x * y)
                    .collect();
                let raw = Self {
                    spec: self.spec,
                    values,
                };
                Ok(raw.two_thirds_mask())
            }
            DealiasRule::ExactPadding => Ok(self.multiply_padded(other)),
        }
    }

    fn multiply_padded(&self, other: &Self) -> Self {
        let [nx, ny, nz] = self.spec.dims();
        let pd = [2 * nx, 2 * ny, 2 * nz];
        let a = pad_spectrum(&self.spectrum(), self.spec.dims(), pd);
        let b = pad_spectrum(&other.spectrum(), other.spec.dims(), pd);
        let mut pa = a;
        let mut pb = b;
        fft::inverse(&mut pa, pd);
        fft::inverse(&mut pb, pd);
        for (x, y) in pa.iter_mut().zip(&pb) {
            *x = Complex::new(x.re * y.re, S::zero());
        }
        fft::forward(&mut pa, pd);
        let data = extract_spectrum(&pa, pd, self.spec.dims());
        Self::from_spectrum(self.spec, data)
    }

    /// Solve `laplacian(p) = self` on the torus, mean-zero gauge.
    ///
    /// The source must itself be mean-free (solvability); the check is
    /// relative to the source's max norm.
    pub fn poisson_solve_torus(&self) -> Result<Self, FieldError> {
        let mut data = self.spectrum();
        let mean = data[0].norm();
        let scale = self.max_norm();
        let tolerance = default_tol_mean::<S>();
        if scale > S::zero() && mean > tolerance * scale {
            return Err(FieldError::IncompatibleSource {
                mean: mean.to_f64().unwrap_or(f64::NAN),
                tol: (tolerance * scale).to_f64().unwrap_or(f64::NAN),
            });
        }
        let [nx, ny, nz] = self.spec.dims();
        let ks = self.spec.k_scale();
        for iz in 0..nz {
            let kz = fft::wavenumber(iz, nz);
            for iy in 0..ny {
                let ky = fft::wavenumber(iy, ny);
                for ix in 0..nx {
                    let kx = fft::wavenumber(ix, nx);
                    let idx = ix + nx * (iy + ny * iz);
                    if kx == 0 && ky == 0 && kz == 0 {
                        data[idx] = Complex::new(S::zero(), S::zero());
                        continue;
                    }
                    let mut k2 = S::zero();
                    for (a, kv) in [kx, ky, kz].iter().enumerate() {
                        let ka = ks[a] * S::from_i64(*kv).unwrap();
                        k2 += ka * ka;
                    }
                    data[idx] = data[idx].scale(-S::one() / k2);
                }
            }
        }
        Ok(Self::from_spectrum(self.spec, data))
    }

    pub fn mean(&self) -> S {
        self.values.iter().copied().sum::<S>() / S::from_usize(self.values.len()).unwrap()
    }

    pub fn max_norm(&self) -> S {
        self.values.iter().map(|v| v.abs()).fold(S::zero(), S::max)
    }

    pub fn mean_square(&self) -> S {
        self.values.iter().map(|&v| v * v).sum::<S>()
            / S::from_usize(self.values.len()).unwrap()
    }

    /// Extract the mode content as a trig polynomial. Only meaningful on the
    /// `(2*pi)^3` box, where wavevectors are integers.
    pub fn to_trigpoly(&self, rel_cutoff: S) -> TrigPoly<S> {
        let two_pi = S::PI() * cst(2.0);
        let [lx, ly, lz] = self.spec.lengths();
        debug_assert!(
            (lx - two_pi).abs() < tol(1e-12)
                && (ly - two_pi).abs() < tol(1e-12)
                && (lz - two_pi).abs() < tol(1e-12),
            "integer wavevectors require the 2*pi box"
        );
        let [nx, ny, nz] = self.spec.dims();
        let data = self.spectrum();
        let max = data.iter().map(|c| c.norm()).fold(S::zero(), S::max);
        let cut = rel_cutoff * max;
        let mut terms = Vec::new();
        for iz in 0..nz {
            let kz = fft::wavenumber(iz, nz) as i32;
            for iy in 0..ny {
                let ky = fft::wavenumber(iy, ny) as i32;
                for ix in 0..nx {
                    let kx = fft::wavenumber(ix, nx) as i32;
                    let c = data[ix + nx * (iy + ny * iz)];
                    if c.norm() > cut {
                        terms.push(([kx, ky, kz], c));
                    }
                }
            }
        }
        TrigPoly::from_terms(terms)
    }
}

fn pad_spectrum<S: Real>(
    data: &[Complex<S>],
    dims: [usize; 3],
    padded: [usize; 3],
) -> Vec<Complex<S>> {
    let mut out = vec![Complex::new(S::zero(), S::zero()); padded[0] * padded[1] * padded[2]];
    let half = cst::<S>(0.5);
    // Per-axis scatter targets; the Nyquist coefficient is split evenly
    // between +n/2 and -n/2 so the padded spectrum stays Hermitian.
    let targets = |m: usize, n: usize, np: usize| -> Vec<(usize, S)> {
        let k = fft::wavenumber(m, n);
        if m == n / 2 {
            vec![
                (fft::mode_index(k, np), half),
                (fft::mode_index(-k, np), half),
            ]
        } else {
            vec![(fft::mode_index(k, np), S::one())]
        }
    };
    for iz in 0..dims[2] {
        let tz = targets(iz, dims[2], padded[2]);
        for iy in 0..dims[1] {
            let ty = targets(iy, dims[1], padded[1]);
            for ix in 0..dims[0] {
                let tx = targets(ix, dims[0], padded[0]);
                let c = data[ix + dims[0] * (iy + dims[1] * iz)];
                for &(pz, wz) in &tz {
                    for &(py, wy) in &ty {
                        for &(px, wx) in &tx {
                            out[px + padded[0] * (py + padded[1] * pz)] +=
                                c.scale(wx * wy * wz);
                        }
                    }
                }
            }
        }
    }
    out
}

fn extract_spectrum<S: Real>(
    data: &[Complex<S>],
    padded: [usize; 3],
    dims: [usize; 3],
) -> Vec<Complex<S>> {
    let mut out = vec![Complex::new(S::zero(), S::zero()); dims[0] * dims[1] * dims[2]];
    let sources = |m: usize, n: usize, np: usize| -> Vec<usize> {
        let k = fft::wavenumber(m, n);
        if m == n / 2 {
            vec![fft::mode_index(k, np), fft::mode_index(-k, np)]
        } else {
            vec![fft::mode_index(k, np)]
        }
    };
    for iz in 0..dims[2] {
        let sz = sources(iz, dims[2], padded[2]);
        for iy in 0..dims[1] {
            let sy = sources(iy, dims[1], padded[1]);
            for ix in 0..dims[0] {
                let sx = sources(ix, dims[0], padded[0]);
                let mut acc = Complex::new(S::zero(), S::zero());
                for &pz in &sz {
                    for &py in &sy {
                        for &px in &sx {
                            acc += data[px + padded[0] * (py + padded[1] * pz)];
                        }
                    }
                }
                out[ix + dims[0] * (iy + dims[1] * iz)] = acc;
            }
        }
    }
    out
}

impl<S: Real> TrigPoly<S> {
    /// Sample onto a grid; fails when the support exceeds the grid Nyquist.
    pub fn to_grid(&self, spec: &GridSpec<S>) -> Result<GridField<S>, FieldError> {
        let m = self.max_wavenumber();
        let dims = spec.dims();
        for a in 0..3 {
            let nyquist = (dims[a] / 2) as i32 - 1;
            if m[a] > nyquist {
                return Err(FieldError::ResolutionExceeded {
                    kmax: m[a],
                    nyquist,
                });
            }
        }
        let values = self.sample(dims[0], dims[1], dims[2]);
        GridField::from_values(*spec, values)
    }

    /// Sample all three components of a vector of trig polynomials.
    pub fn to_grid_vector(
        v: &VectorField<TrigPoly<S>>,
        spec: &GridSpec<S>,
    ) -> Result<VectorField<GridField<S>>, FieldError> {
        Ok(VectorField::new(
            v.x.to_grid(spec)?,
            v.y.to_grid(spec)?,
            v.z.to_grid(spec)?,
        ))
    }
}

impl<S: Real> ScalarField<S> for GridField<S> {
    fn zero_like(&self) -> Self {
        Self::zeros(self.spec)
    }

    fn add(&self, other: &Self) -> Self {
        self.spec.check_match(&other.spec).expect("grid mismatch");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a + b)
            .collect();
        Self {
            spec: self.spec,
            values,
        }
    }

    fn sub(&self, other: &Self) -> Self {
        self.spec.check_match(&other.spec).expect("grid mismatch");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a - b)
            .collect();
        Self {
            spec: self.spec,
            values,
        }
    }

    fn scale(&self, c: S) -> Self {
        let values = self.values.iter().map(|&v| v * c).collect();
        Self {
            spec: self.spec,
            values,
        }
    }

    fn mul(&self, other: &Self) -> Self {
        self.multiply(other).expect("grid mismatch")
    }

    fn derivative(&self, axis: Axis) -> Self {
        GridField::derivative(self, axis)
    }

    fn laplacian(&self) -> Self {
        GridField::laplacian(self)
    }

    fn poisson_inverse(&self) -> Result<Self, FieldError> {
        self.poisson_solve_torus()
    }

    fn mean(&self) -> S {
        GridField::mean(self)
    }

    fn max_norm(&self) -> S {
        GridField::max_norm(self)
    }

    fn mean_square(&self) -> S {
        GridField::mean_square(self)
    }

    fn domain_volume(&self) -> S {
        self.spec.volume()
    }

    fn band_limit(&self) -> usize {
        let data = self.spectrum();
        let peak = data.iter().map(|c| c.norm()).fold(S::zero(), S::max);
        if peak == S::zero() {
            return 0;
        }
        let threshold = peak * tol::<S>(1e-13);
        let [nx, ny, nz] = self.spec.dims();
        let mut band = 0usize;
        for iz in 0..nz {
            let kz = fft::wavenumber(iz, nz).unsigned_abs() as usize;
            for iy in 0..ny {
                let ky = fft::wavenumber(iy, ny).unsigned_abs() as usize;
                for ix in 0..nx {
                    let kx = fft::wavenumber(ix, nx).unsigned_abs() as usize;
                    if data[ix + nx * (iy + ny * iz)].norm() > threshold {
                        band = band.max(kx.max(ky).max(kz));
                    }
                }
            }
        }
        band
    }

    fn truncate_band(&self, kmax: usize) -> Self {
        let k = kmax as i64;
        self.map_modes(|kv| {
            if kv.iter().all(|c| c.abs() <= k) {
                Complex::new(S::one(), S::zero())
            } else {
                Complex::new(S::zero(), S::zero())
            }
        })
    }

    fn dof_count(&self) -> usize {
        self.spec.len()
    }

    fn default_tol_div() -> S {
        tol(1e-9)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigpoly::TrigPoly;

    fn cubic(n: usize, rule: DealiasRule) -> GridSpec<f64> {
        GridSpec::cubic(n, rule).unwrap()
    }

    #[test]
    fn spec_rejects_bad_dims() {
        assert!(GridSpec::<f64>::new(7, 8, 8, 1.0, 1.0, 1.0, DealiasRule::TwoThirds).is_err());
        assert!(GridSpec::<f64>::new(2, 8, 8, 1.0, 1.0, 1.0, DealiasRule::TwoThirds).is_err());
        assert!(GridSpec::<f64>::new(8, 8, 8, 0.0, 1.0, 1.0, DealiasRule::TwoThirds).is_err());
    }

    #[test]
    fn from_values_rejects_non_finite() {
        let spec = cubic(4, DealiasRule::TwoThirds);
        let mut vals = vec![0.0; spec.len()];
        vals[3] = f64::NAN;
        assert!(matches!(
            GridField::from_values(spec, vals),
            Err(FieldError::NonFinite)
        ));
    }

    #[test]
    fn derivative_of_sine() {
        let spec = cubic(16, DealiasRule::TwoThirds);
        let f = GridField::from_fn(spec, |x, _, _| (2.0 * x).sin());
        let dx = f.derivative(Axis::X);
        let expected = GridField::from_fn(spec, |x, _, _| 2.0 * (2.0 * x).cos());
        assert!(dx.sub(&expected).max_norm() < 1e-12);
        assert!(f.derivative(Axis::Y).max_norm() < 1e-12);
    }

    #[test]
    fn derivative_respects_box_length() {
        // Length-pi box: d/dx sin(4*pi*x/L) with L = pi has slope 4.
        let spec =
            GridSpec::<f64>::new(16, 4, 4, std::f64::consts::PI, 1.0, 1.0, DealiasRule::TwoThirds)
                .unwrap();
        let f = GridField::from_fn(spec, |x, _, _| (4.0 * x).sin());
        let expected = GridField::from_fn(spec, |x, _, _| 4.0 * (4.0 * x).cos());
        assert!(f.derivative(Axis::X).sub(&expected).max_norm() < 1e-11);
    }

    #[test]
    fn laplacian_is_div_grad() {
        let spec = cubic(16, DealiasRule::TwoThirds);
        let f = GridField::from_fn(spec, |x, y, z| x.sin() * (2.0 * y).cos() + z.cos());
        let lap = f.laplacian();
        let div_grad = f
            .derivative(Axis::X)
            .derivative(Axis::X)
            .add(&f.derivative(Axis::Y).derivative(Axis::Y))
            .add(&f.derivative(Axis::Z).derivative(Axis::Z));
        assert!(lap.sub(&div_grad).max_norm() < 1e-11);
    }

    #[test]
    fn poisson_inverts_cosine() {
        // laplacian(p) = cos x + cos 2y has p = -cos x - cos(2y)/4.
        let spec = cubic(16, DealiasRule::TwoThirds);
        let g = GridField::from_fn(spec, |x, y, _| x.cos() + (2.0 * y).cos());
        let p = g.poisson_solve_torus().unwrap();
        let expected = GridField::from_fn(spec, |x, y, _| -x.cos() - (2.0 * y).cos() / 4.0);
        assert!(p.sub(&expected).max_norm() < 1e-12);
        assert!(p.mean().abs() < 1e-13);
    }

    #[test]
    fn poisson_rejects_mean_source() {
        let spec = cubic(8, DealiasRule::TwoThirds);
        let g = GridField::from_fn(spec, |x, _, _| x.cos() + 0.5);
        assert!(matches!(
            g.poisson_solve_torus(),
            Err(FieldError::IncompatibleSource { .. })
        ));
    }

    #[test]
    fn mean_square_matches_parseval() {
        let spec = cubic(16, DealiasRule::TwoThirds);
        let f = GridField::from_fn(spec, |x, y, _| x.cos() + 3.0 * (2.0 * y).sin());
        // mean of cos^2 is 1/2, of 9 sin^2 is 9/2; cross term integrates out.
        assert!((f.mean_square() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn exact_padding_product_matches_trigpoly() {
        let mut a = TrigPoly::<f64>::cosine([1, 0, 0], 1.0);
        a = a.add(&TrigPoly::sine([0, 2, 1], 0.7));
        let b = TrigPoly::<f64>::sine([1, 1, 0], -0.3).add(&TrigPoly::constant(0.25));
        let exact = a.mul(&b);

        let spec = cubic(16, DealiasRule::ExactPadding);
        let ga = a.to_grid(&spec).unwrap();
        let gb = b.to_grid(&spec).unwrap();
        let gp = ga.multiply(&gb).unwrap();
        // Product support (|k| <= 4) still fits on the grid.
        let expected = exact.to_grid(&spec).unwrap();
        assert!(gp.sub(&expected).max_norm() < 1e-13);
    }

    #[test]
    fn two_thirds_matches_exact_padding_inside_band() {
        // Factors with support inside n/3 alias only outside the kept band,
        // so both rules agree after masking the product's retained modes.
        let a = TrigPoly::<f64>::cosine([2, 1, 0], 1.0);
        let b = TrigPoly::<f64>::sine([1, 0, 2], 0.5);
        let exact = a.mul(&b);

        let spec23 = cubic(24, DealiasRule::TwoThirds);
        let g23 = a
            .to_grid(&spec23)
            .unwrap()
            .multiply(&b.to_grid(&spec23).unwrap())
            .unwrap();
        let expected = exact.to_grid(&spec23).unwrap();
        // Support of the product is |k| <= 4, within the 24/3 = 8 cut.
        assert!(g23.sub(&expected).max_norm() < 1e-13);
    }

    #[test]
    fn trigpoly_grid_roundtrip() {
        let mut p = TrigPoly::<f64>::cosine([3, -2, 1], 0.9);
        p = p.add(&TrigPoly::sine([0, 1, 0], -1.4));
        let spec = cubic(16, DealiasRule::TwoThirds);
        let g = p.to_grid(&spec).unwrap();
        let back = g.to_trigpoly(1e-12);
        assert!(back.sub(&p).max_norm() < 1e-12);
    }

    #[test]
    fn to_grid_rejects_unresolved_modes() {
        let p = TrigPoly::<f64>::cosine([9, 0, 0], 1.0);
        let spec = cubic(16, DealiasRule::TwoThirds);
        assert!(matches!(
            p.to_grid(&spec),
            Err(FieldError::ResolutionExceeded { .. })
        ));
    }

    #[test]
    fn mismatched_specs_rejected() {
        let a = GridField::zeros(cubic(8, DealiasRule::TwoThirds));
        let b = GridField::zeros(cubic(16, DealiasRule::TwoThirds));
        assert!(matches!(
            a.multiply(&b),
            Err(FieldError::GridMismatch { .. })
        ));
    }
}
