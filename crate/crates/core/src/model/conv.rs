//! Circular convolution and correlation over real vectors.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Below this length the direct O(D²) sum is used.
const DIRECT_MAX: usize = 64;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    })
}

pub(crate) fn spectrum(x: &[f64]) -> Vec<Complex64> {
    let (fwd, _) = plans(x.len());
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fwd.process(&mut buf);
    buf
}

/// Inverse transform with 1/D scaling, keeping the real part.
pub(crate) fn inverse_spectrum(mut spec: Vec<Complex64>) -> Vec<f64> {
    let n = spec.len();
    let (_, inv) = plans(n);
    inv.process(&mut spec);
    spec.iter().map(|z| z.re / n as f64).collect()
}

/// z_j = Σ_k b_k a_{(j - k) mod D}
pub fn circular_convolution(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    let d = a.len();
    if d <= DIRECT_MAX {
        return (0..d).map(|j| (0..d).map(|k| b[k] * a[(j + d - k) % d]).sum()).collect();
    }
    let fa = spectrum(a);
    let fb = spectrum(b);
    inverse_spectrum(fa.iter().zip(&fb).map(|(x, y)| x * y).collect())
}

/// y_j = Σ_k a_k z_{(j + k) mod D}; the approximate inverse of convolving with `a`.
pub fn circular_correlation(a: &[f64], z: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), z.len());
    let d = a.len();
    if d <= DIRECT_MAX {
        return (0..d).map(|j| (0..d).map(|k| a[k] * z[(j + k) % d]).sum()).collect();
    }
    let fa = spectrum(a);
    let fz = spectrum(z);
    inverse_spectrum(fa.iter().zip(&fz).map(|(x, y)| x.conj() * y).collect())
}
