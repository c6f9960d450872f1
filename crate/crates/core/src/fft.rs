//! Minimal 3-D complex FFT built on `rustfft`, x-fastest memory order.
//!
//! Conventions: [`forward`] is the analysis transform and includes the `1/N`
//! normalization, so the output entries are the coefficients of
//! `exp(i k . x)`. [`inverse`] is the unscaled synthesis transform.

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};

use crate::num::Real;

/// Wavenumber for mode index `m` on an axis of `n` points (`n` even).
///
/// Indices above the Nyquist fold to negative wavenumbers; the Nyquist mode
/// itself is reported as `+n/2`.
pub fn wavenumber(m: usize, n: usize) -> i64 {
    if m <= n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// Mode index holding wavenumber `k` on an axis of `n` points.
pub fn mode_index(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

fn transform_axis<S: Real>(
    data: &mut [Complex<S>],
    dims: [usize; 3],
    axis: usize,
    direction: FftDirection,
) {
    let len = dims[axis];
    let total = dims[0] * dims[1] * dims[2];
    let stride: usize = dims[..axis].iter().product();
    let n_lines = total / len;

    let mut planner = FftPlanner::<S>::new();
    let fft = planner.plan_fft(len, direction);

    // Gather strided lines into a row-contiguous scratch matrix, transform
    // rows in parallel, scatter back.
    let mut rows = vec![Complex::new(S::zero(), S::zero()); total];
    rows.par_chunks_exact_mut(len)
        .enumerate()
        .for_each(|(r, row)| {
            let inner = r % stride;
            let outer = r / stride;
            let base = inner + stride * len * outer;
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = data[base + stride * j];
            }
        });

    rows.par_chunks_exact_mut(len)
        .for_each_init(
            || vec![Complex::new(S::zero(), S::zero()); fft.get_inplace_scratch_len()],
            |scratch, row| fft.process_with_scratch(row, scratch),
        );

    let data_ptr = SendPtr(data.as_mut_ptr());
    rows.par_chunks_exact(len).enumerate().for_each(|(r, row)| {
        let ptr = data_ptr.get();
        let inner = r % stride;
        let outer = r / stride;
        let base = inner + stride * len * outer;
        for (j, v) in row.iter().enumerate() {
            // Lines are disjoint across rows, so the writes never overlap.
            unsafe { *ptr.add(base + stride * j) = *v };
        }
    });
    let _ = n_lines;
}

#[derive(Clone, Copy)]
struct SendPtr<T>(*mut T);
unsafe impl<T> Send for SendPtr<T> {}
unsafe impl<T> Sync for SendPtr<T> {}

impl<T> SendPtr<T> {
    fn get(self) -> *mut T {
        self.0
    }
}

/// In-place analysis transform with `1/N` normalization.
pub fn forward<S: Real>(data: &mut [Complex<S>], dims: [usize; 3]) {
    assert_eq!(data.len(), dims[0] * dims[1] * dims[2]);
    for axis in 0..3 {
        transform_axis(data, dims, axis, FftDirection::Forward);
    }
    let scale = S::one() / S::from_usize(data.len()).unwrap();
    data.par_iter_mut().for_each(|v| *v = v.scale(scale));
}

/// In-place unscaled synthesis transform.
pub fn inverse<S: Real>(data: &mut [Complex<S>], dims: [usize; 3]) {
    assert_eq!(data.len(), dims[0] * dims[1] * dims[2]);
    for axis in 0..3 {
        transform_axis(data, dims, axis, FftDirection::Inverse);
    }
}
