//! n-dimensional FFT on the row-major lattice, built from 1-D rustfft plans
//! applied axis by axis. Plans are cached per thread.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::GridSpec;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plans(m: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(m), p.plan_fft_inverse(m))
    })
}

fn transform_axes(spec: &GridSpec, data: &mut [Complex64], fft: &dyn Fft<f64>) {
    let m = spec.m;
    let n = spec.n;
    let total = data.len();
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..n {
        let stride = m.pow((n - 1 - axis) as u32);
        let block = stride * m;
        for base in (0..total).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                if stride == 1 {
                    fft.process_with_scratch(&mut data[start..start + m], &mut scratch);
                    continue;
                }
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[start + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[start + k * stride] = *v;
                }
            }
        }
    }
}

/// Unnormalized forward DFT: c_k = Σ_x v_x e^{-i ξ_k·(x - x_0)}.
pub(crate) fn forward(spec: &GridSpec, values: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let (fwd, _) = plans(spec.m);
    transform_axes(spec, &mut data, fwd.as_ref());
    data
}

/// Inverse of [`forward`], keeping the real part.
pub(crate) fn inverse_real(spec: &GridSpec, mut coeffs: Vec<Complex64>) -> Vec<f64> {
    let (_, inv) = plans(spec.m);
    transform_axes(spec, &mut coeffs, inv.as_ref());
    let scale = 1.0 / coeffs.len() as f64;
    coeffs.iter().map(|c| c.re * scale).collect()
}

/// Signed integer wavenumber index for a 1-D FFT slot.
pub(crate) fn signed_index(i: usize, m: usize) -> i64 {
    if i <= m / 2 {
        i as i64
    } else {
        i as i64 - m as i64
    }
}

/// Per-axis multi-index of a flat lattice position.
pub(crate) fn unflatten(spec: &GridSpec, mut flat: usize) -> [usize; 3] {
    let mut idx = [0usize; 3];
    for axis in (0..spec.n).rev() {
        idx[axis] = flat % spec.m;
        flat /= spec.m;
    }
    idx
}

/// |ξ|² for every flat spectral slot.
pub(crate) fn wavenumber_sq(spec: &GridSpec) -> Vec<f64> {
    let axis: Vec<f64> = (0..spec.m)
        .map(|i| {
            let xi = spec.wavenumber(i);
            xi * xi
        })
        .collect();
    (0..spec.len())
        .map(|flat| {
            let idx = unflatten(spec, flat);
            (0..spec.n).map(|a| axis[idx[a]]).sum()
        })
        .collect()
}

/// Apply a real radial multiplier g(|ξ|²) in spectral space.
pub(crate) fn apply_radial(spec: &GridSpec, values: &[f64], g: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut coeffs = forward(spec, values);
    for (c, k2) in coeffs.iter_mut().zip(wavenumber_sq(spec)) {
        *c *= g(k2);
    }
    inverse_real(spec, coeffs)
}

/// Apply a precomputed multiplier, one entry per spectral slot.
pub(crate) fn apply_multiplier(spec: &GridSpec, values: &[f64], mult: &[f64]) -> Vec<f64> {
    let mut coeffs = forward(spec, values);
    for (c, g) in coeffs.iter_mut().zip(mult) {
        *c *= *g;
    }
    inverse_real(spec, coeffs)
}
