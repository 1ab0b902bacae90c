//! DFT reference utilities (`X(k) = sum_n x(n) e^{-j 2 pi k n / N}`).

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Result, SfaError};

/// Forward DFT of a real sequence.
pub fn dft(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward(&mut buf);
    buf
}

/// `len`-point DFT of `x` zero-padded to `len`.
pub fn dft_padded(x: &[f64], len: usize) -> Result<Vec<Complex64>> {
    if len < x.len() {
        return Err(SfaError::LengthMismatch {
            expected: x.len(),
            got: len,
        });
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (b, &v) in buf.iter_mut().zip(x) {
        b.re = v;
    }
    forward(&mut buf);
    Ok(buf)
}

/// Inverse DFT `x(n) = (1/N) sum_k X(k) e^{j 2 pi k n / N}`, complex output.
pub fn idft_complex(spec: &[Complex64]) -> Vec<Complex64> {
    let mut buf = spec.to_vec();
    if buf.is_empty() {
        return buf;
    }
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_inverse(buf.len()).process(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// Inverse DFT keeping the real part; `expected_len` guards against
/// pairing a spectrum with the wrong signal length.
pub fn idft(spec: &[Complex64], expected_len: usize) -> Result<Vec<f64>> {
    if spec.len() != expected_len {
        return Err(SfaError::LengthMismatch {
            expected: expected_len,
            got: spec.len(),
        });
    }
    Ok(idft_complex(spec).into_iter().map(|c| c.re).collect())
}

pub(crate) fn forward(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(buf.len()).process(buf);
}
