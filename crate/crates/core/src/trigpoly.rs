//! Exact algebra of finite trigonometric polynomials.
//!
//! A [`TrigPoly`] is a finite Fourier sum over integer wavevectors on the
//! `(2*pi)^3` torus, stored as a map from wavevector to complex coefficient
//! with Hermitian symmetry (the represented field is real-valued). Products
//! are exact mode convolutions, so this backend is alias-free by
//! construction and serves as ground truth for the grid backend.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex;

use crate::backend::Axis;
use crate::error::FieldError;
use crate::num::{cst, tol, Real};

/// Integer wavevector `(kx, ky, kz)`.
pub type WaveVec = [i32; 3];

/// Relative prune threshold: terms below this fraction of the largest term
/// magnitude are dropped after every operation.
pub fn default_prune_rel<S: Real>() -> S {
    tol(1e-14)
}

/// Finite Fourier sum with Hermitian-symmetric complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly<S: Real> {
    terms: BTreeMap<WaveVec, Complex<S>>,
}

impl<S: Real> Default for TrigPoly<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Real> TrigPoly<S> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: S) -> Self {
        let mut p = Self::zero();
        if c != S::zero() {
            p.terms.insert([0, 0, 0], Complex::new(c, S::zero()));
        }
        p
    }

    /// Add `coeff * exp(i k.x)` together with its conjugate partner at `-k`,
    /// keeping the represented field real.
    pub fn add_harmonic(&mut self, k: WaveVec, coeff: Complex<S>) {
        let zero = Complex::new(S::zero(), S::zero());
        *self.terms.entry(k).or_insert(zero) += coeff;
        let neg = [-k[0], -k[1], -k[2]];
        *self.terms.entry(neg).or_insert(zero) += coeff.conj();
        self.prune(default_prune_rel());
    }

    /// `amp * cos(k.x)`
    pub fn cosine(k: WaveVec, amp: S) -> Self {
        let mut p = Self::zero();
        p.add_harmonic(k, Complex::new(amp / cst(2.0), S::zero()));
        p
    }

    /// `amp * sin(k.x)`
    pub fn sine(k: WaveVec, amp: S) -> Self {
        let mut p = Self::zero();
        p.add_harmonic(k, Complex::new(S::zero(), -amp / cst(2.0)));
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (WaveVec, Complex<S>)>>(iter: I) -> Self {
        let mut p = Self::zero();
        for (k, c) in iter {
            let zero = Complex::new(S::zero(), S::zero());
            *p.terms.entry(k).or_insert(zero) += c;
        }
        p.prune(default_prune_rel());
        debug_assert!(p.is_hermitian(tol(1e-12)));
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WaveVec, &Complex<S>)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, k: WaveVec) -> Complex<S> {
        self.terms
            .get(&k)
            .copied()
            .unwrap_or_else(|| Complex::new(S::zero(), S::zero()))
    }

    /// Largest absolute wavenumber per axis (`[0,0,0]` for the zero poly).
    pub fn max_wavenumber(&self) -> [i32; 3] {
        let mut m = [0i32; 3];
        for k in self.terms.keys() {
            for a in 0..3 {
                m[a] = m[a].max(k[a].abs());
            }
        }
        m
    }

    fn max_term_magnitude(&self) -> S {
        self.terms
            .values()
            .map(|c| c.norm())
            .fold(S::zero(), S::max)
    }

    /// Drop terms with magnitude below `rel` times the largest term.
    pub fn prune(&mut self, rel: S) {
        let max = self.max_term_magnitude();
        if max == S::zero() {
            self.terms.clear();
            return;
        }
        let cut = rel * max;
        self.terms.retain(|_, c| c.norm() > cut);
    }

    pub fn is_hermitian(&self, tolerance: S) -> bool {
        let scale = self.max_term_magnitude().max(S::one());
        self.terms.iter().all(|(k, c)| {
            let neg = [-k[0], -k[1], -k[2]];
            (self.coefficient(neg).conj() - c).norm() <= tolerance * scale
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        let zero = Complex::new(S::zero(), S::zero());
        for (k, c) in &other.terms {
            *terms.entry(*k).or_insert(zero) += *c;
        }
        let mut p = Self { terms };
        p.prune(default_prune_rel());
        debug_assert!(p.is_hermitian(tol(1e-12)));
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-S::one()))
    }

    pub fn scale(&self, c: S) -> Self {
        if c == S::zero() {
            return Self::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| (*k, v.scale(c)))
            .collect();
        Self { terms }
    }

    /// Exact product by mode convolution; the support of the result is the
    /// Minkowski sum of the input supports (before pruning).
    pub fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<WaveVec, Complex<S>> = BTreeMap::new();
        let zero = Complex::new(S::zero(), S::zero());
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let k = [ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2]];
                *terms.entry(k).or_insert(zero) += ca * cb;
            }
        }
        let mut p = Self { terms };
        p.prune(default_prune_rel());
        debug_assert!(p.is_hermitian(tol(1e-12)));
        p
    }

    pub fn derivative(&self, axis: Axis) -> Self {
        let a = axis as usize;
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| k[a] != 0)
            .map(|(k, c)| {
                let ik = Complex::new(S::zero(), S::from_i32(k[a]).unwrap());
                (*k, c * ik)
            })
            .collect();
        let mut p = Self { terms };
        p.prune(default_prune_rel());
        p
    }

    pub fn laplacian(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| {
                let k2 = S::from_i32(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).unwrap();
                (*k, c.scale(-k2))
            })
            .collect();
        let mut p = Self { terms };
        p.prune(default_prune_rel());
        p
    }

    /// Solve `laplacian(p) = self` exactly, mean-zero gauge.
    ///
    /// Fails unless the zero-mode of the source is (numerically) zero.
    pub fn poisson_inverse(&self) -> Result<Self, FieldError> {
        let mean = self.coefficient([0, 0, 0]).norm();
        let scale = self.max_term_magnitude();
        let tolerance = tol::<S>(1e-10);
        if scale > S::zero() && mean > tolerance * scale {
            return Err(FieldError::IncompatibleSource {
                mean: mean.to_f64().unwrap_or(f64::NAN),
                tol: (tolerance * scale).to_f64().unwrap_or(f64::NAN),
            });
        }
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| **k != [0, 0, 0])
            .map(|(k, c)| {
                let k2 = S::from_i32(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).unwrap();
                (*k, c.scale(-S::one() / k2))
            })
            .collect();
        let mut p = Self { terms };
        p.prune(default_prune_rel());
        Ok(p)
    }

    /// Exact pointwise evaluation at `(x, y, z)`.
    pub fn eval(&self, point: [S; 3]) -> S {
        let mut acc = S::zero();
        for (k, c) in &self.terms {
            let phase = S::from_i32(k[0]).unwrap() * point[0]
                + S::from_i32(k[1]).unwrap() * point[1]
                + S::from_i32(k[2]).unwrap() * point[2];
            acc += c.re * phase.cos() - c.im * phase.sin();
        }
        acc
    }

    /// Mean over the torus (zero-mode coefficient).
    pub fn mean(&self) -> S {
        self.coefficient([0, 0, 0]).re
    }

    /// Mean of the squared field (Parseval: sum of squared mode magnitudes).
    pub fn mean_square(&self) -> S {
        self.terms.values().map(|c| c.norm_sqr()).sum()
    }

    /// Max norm, sampled on a uniform grid oversampling the support 4x.
    pub fn max_norm(&self) -> S {
        if self.is_zero() {
            return S::zero();
        }
        let m = self.max_wavenumber();
        let dims: Vec<usize> = m
            .iter()
            .map(|&k| (4 * (k as usize + 1)).next_power_of_two().max(8))
            .collect();
        let grid = self.sample(dims[0], dims[1], dims[2]);
        grid.iter().map(|v| v.abs()).fold(S::zero(), S::max)
    }

    /// Sample on an `nx x ny x nz` uniform grid of the `2*pi` box, x-fastest.
    pub fn sample(&self, nx: usize, ny: usize, nz: usize) -> Vec<S> {
        let dims = [nx, ny, nz];
        let mut data = vec![Complex::new(S::zero(), S::zero()); nx * ny * nz];
        for (k, c) in &self.terms {
            let ix = crate::fft::mode_index(k[0] as i64, nx);
            let iy = crate::fft::mode_index(k[1] as i64, ny);
            let iz = crate::fft::mode_index(k[2] as i64, nz);
            data[ix + nx * (iy + ny * iz)] += *c;
        }
        crate::fft::inverse(&mut data, dims);
        data.into_iter().map(|c| c.re).collect()
    }

    /// Textual dump: one line per term `kx ky kz re im`, lexicographic order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (k, c) in &self.terms {
            writeln!(out, "{} {} {} {} {}", k[0], k[1], k[2], c.re, c.im).unwrap();
        }
        out
    }

    pub fn parse_dump(text: &str) -> Result<Self, crate::error::DumpError> {
        use crate::error::DumpError;
        let mut terms = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 5 {
                return Err(DumpError::Malformed(format!(
                    "line {}: expected 5 fields, found {}",
                    lineno + 1,
                    parts.len()
                )));
            }
            let k: WaveVec = [
                parts[0].parse().map_err(|e| bad(lineno, e))?,
                parts[1].parse().map_err(|e| bad(lineno, e))?,
                parts[2].parse().map_err(|e| bad(lineno, e))?,
            ];
            let re: f64 = parts[3].parse().map_err(|e| bad(lineno, e))?;
            let im: f64 = parts[4].parse().map_err(|e| bad(lineno, e))?;
            terms.insert(k, Complex::new(cst::<S>(re), cst::<S>(im)));
        }
        return Ok(Self { terms });

        fn bad<E: std::fmt::Display>(lineno: usize, e: E) -> DumpError {
            DumpError::Malformed(format!("line {}: {}", lineno + 1, e))
        }
    }
}

impl<S: Real> crate::backend::ScalarField<S> for TrigPoly<S> {
    fn zero_like(&self) -> Self {
        Self::zero()
    }

    fn add(&self, other: &Self) -> Self {
        TrigPoly::add(self, other)
    }

    fn sub(&self, other: &Self) -> Self {
        TrigPoly::sub(self, other)
    }

    fn scale(&self, c: S) -> Self {
        TrigPoly::scale(self, c)
    }

    fn mul(&self, other: &Self) -> Self {
        TrigPoly::mul(self, other)
    }

    fn derivative(&self, axis: Axis) -> Self {
        TrigPoly::derivative(self, axis)
    }

    fn laplacian(&self) -> Self {
        TrigPoly::laplacian(self)
    }

    fn poisson_inverse(&self) -> Result<Self, FieldError> {
        TrigPoly::poisson_inverse(self)
    }

    fn mean(&self) -> S {
        TrigPoly::mean(self)
    }

    fn max_norm(&self) -> S {
        TrigPoly::max_norm(self)
    }

    fn mean_square(&self) -> S {
        TrigPoly::mean_square(self)
    }

    fn domain_volume(&self) -> S {
        let two_pi = S::PI() * cst(2.0);
        two_pi * two_pi * two_pi
    }

    fn band_limit(&self) -> usize {
        self.terms
            .keys()
            .map(|k| k.iter().map(|c| c.unsigned_abs() as usize).max().unwrap())
            .max()
            .unwrap_or(0)
    }

    fn truncate_band(&self, kmax: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| k.iter().all(|c| c.unsigned_abs() as usize <= kmax))
            .map(|(k, c)| (*k, *c))
            .collect();
        Self { terms }
    }

    fn dof_count(&self) -> usize {
        self.num_terms()
    }

    fn default_tol_div() -> S {
        tol(1e-12)
    }
}
