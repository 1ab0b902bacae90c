//! Linear time-invariant reference methods: a zero-phase DFT-mask band-pass
//! and the FFT analytic signal.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dft::{dft, idft_complex};
use crate::error::{Result, SfaError};

/// Width (cycles/sample) of the raised-cosine skirts outside the pass band.
pub const TRANSITION_WIDTH: f64 = 0.01;

/// Gain of the band-pass mask at normalized frequency `f` in `[0, 0.5]`.
pub fn bandpass_gain(f: f64, lo: f64, hi: f64) -> f64 {
    let skirt = |d: f64| {
        if d >= TRANSITION_WIDTH {
            0.0
        } else {
            0.5 * (1.0 + (PI * d / TRANSITION_WIDTH).cos())
        }
    };
    if f < lo {
        skirt(lo - f)
    } else if f > hi {
        skirt(f - hi)
    } else {
        1.0
    }
}

/// Zero-phase band-pass over `[lo, hi]` by masking the DFT of `x`.
pub fn fft_bandpass(x: &[f64], lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(lo >= 0.0 && lo < hi && hi <= 0.5) {
        return Err(SfaError::BadBand { lo, hi });
    }
    let n = x.len();
    let mut spec = dft(x);
    for (k, v) in spec.iter_mut().enumerate() {
        let f = k.min(n - k) as f64 / n as f64;
        *v *= bandpass_gain(f, lo, hi);
    }
    Ok(idft_complex(&spec).into_iter().map(|c| c.re).collect())
}

/// Analytic signal `x + j H{x}`: negative frequencies removed, positive ones
/// doubled, DC and Nyquist kept.
pub fn hilbert_analytic(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let mut spec = dft(x);
    for (k, v) in spec.iter_mut().enumerate() {
        let twice = 2 * k;
        if k == 0 || twice == n {
            continue;
        }
        *v *= if twice < n { 2.0 } else { 0.0 };
    }
    idft_complex(&spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(n: usize, k: usize) -> Vec<f64> {
        (0..n).map(|i| (2.0 * PI * (k * i) as f64 / n as f64).cos()).collect()
    }

    #[test]
    fn full_band_is_identity() {
        let x: Vec<f64> = (0..37).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
        let y = fft_bandpass(&x, 0.0, 0.5).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn tone_in_and_out_of_band() {
        let x = tone(100, 10);
        let y = fft_bandpass(&x, 0.08, 0.12).unwrap();
        assert!(x.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-10));
        let y = fft_bandpass(&x, 0.2, 0.3).unwrap();
        assert!(y.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn bad_bands() {
        for (lo, hi) in [(0.2, 0.1), (-0.1, 0.2), (0.1, 0.6), (0.1, 0.1)] {
            assert!(matches!(fft_bandpass(&[1.0, 2.0], lo, hi), Err(SfaError::BadBand { .. })));
        }
    }

    #[test]
    fn skirt_shape() {
        assert_eq!(bandpass_gain(0.1, 0.1, 0.2), 1.0);
        assert!((bandpass_gain(0.205, 0.1, 0.2) - 0.5).abs() < 1e-12);
        assert_eq!(bandpass_gain(0.25, 0.1, 0.2), 0.0);
    }

    #[test]
    fn analytic_of_on_bin_cosine() {
        for n in [16, 17] {
            let z = hilbert_analytic(&tone(n, 3));
            for (i, v) in z.iter().enumerate() {
                let e = Complex64::from_polar(1.0, 2.0 * PI * (3 * i) as f64 / n as f64);
                assert!((v - e).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn analytic_real_part_is_input() {
        for n in [2, 9, 64] {
            let x: Vec<f64> = (0..n).map(|i| ((i * 13) % 7) as f64 * 0.3 - 1.0).collect();
            let z = hilbert_analytic(&x);
            assert!(x.iter().zip(&z).all(|(a, b)| (a - b.re).abs() < 1e-10));
        }
    }
}
