//! Signals, frequency grids, amplitude decompositions and their spectra.
//!
//! A decomposition expresses an `N`-point real signal as
//!
//! ```text
//! x(n) = sum_k a(n,k) cos(2 pi f_k n) + b(n,k) sin(2 pi f_k n)
//! ```
//!
//! where the amplitudes `a(., k)` and `b(., k)` are allowed to vary with `n`.
//! Amplitude matrices are stored column-major: each frequency column is a
//! contiguous slice of length `N`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SfaError};

/// A real, finite, discrete-time signal with at least two samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        Self::with_rate(samples, 1.0)
    }

    pub fn with_rate(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(SfaError::SignalTooShort(samples.len()));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(SfaError::NonFinite {
                context: format!("sample {i}"),
            });
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(SfaError::Config {
                field: "sample_rate",
                reason: format!("must be positive and finite, got {sample_rate}"),
            });
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Samples per second. Only used to label time axes.
    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    /// Time in seconds of sample `n`.
    pub fn time(&self, n: usize) -> f64 {
        n as f64 / self.sample_rate
    }

    pub fn norm2(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// `K` uniformly spaced normalized frequencies `f_k = k / period`.
///
/// The plain grid uses `period = K`, covering `[0, 1)`. Grids that only span
/// the non-redundant half band `[0, 0.5)` for real signals use `period = 2K`.
/// Frequencies are always strictly below 1 because `period >= K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    count: usize,
    period: usize,
}

impl FrequencyGrid {
    /// `f_k = k / K`, covering `[0, 1)`.
    pub fn full(count: usize) -> Result<Self> {
        Self::with_period(count, count)
    }

    /// `f_k = k / (2K)`, covering `[0, 0.5)`.
    pub fn half(count: usize) -> Result<Self> {
        Self::with_period(count, count.saturating_mul(2))
    }

    /// `f_k = k / period` for `k < count`.
    pub fn with_period(count: usize, period: usize) -> Result<Self> {
        if count == 0 {
            return Err(SfaError::Config {
                field: "K",
                reason: "frequency grid needs at least one frequency".into(),
            });
        }
        if period < count {
            return Err(SfaError::Config {
                field: "period",
                reason: format!("period {period} must be >= K = {count} so that f_k < 1"),
            });
        }
        Ok(Self { count, period })
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// Normalized frequency `f_k` in cycles/sample.
    pub fn freq(&self, k: usize) -> f64 {
        k as f64 / self.period as f64
    }

    /// Angular frequency `2 pi f_k` in radians/sample.
    pub fn omega(&self, k: usize) -> f64 {
        2.0 * PI * self.freq(k)
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.freq(k)).collect()
    }

    /// The phase `2 pi f_k n` reduced modulo `2 pi` using integer arithmetic,
    /// so that long signals do not lose precision.
    pub fn phase(&self, n: usize, k: usize) -> f64 {
        let r = ((n as u128 * k as u128) % self.period as u128) as f64;
        2.0 * PI * r / self.period as f64
    }

    /// `c(n,k) = cos(2 pi f_k n)`.
    pub fn cos(&self, n: usize, k: usize) -> f64 {
        self.phase(n, k).cos()
    }

    /// `s(n,k) = sin(2 pi f_k n)`.
    pub fn sin(&self, n: usize, k: usize) -> f64 {
        self.phase(n, k).sin()
    }

    /// Tabulates the cosine and sine terms for `n < len`.
    pub fn basis(&self, len: usize) -> Basis {
        let mut cos = AmplitudeMatrix::zeros(len, self.count);
        let mut sin = AmplitudeMatrix::zeros(len, self.count);
        for k in 0..self.count {
            let (cc, sc) = (cos.col_mut(k), sin.col_mut(k));
            for n in 0..len {
                let (s, c) = self.phase(n, k).sin_cos();
                cc[n] = c;
                sc[n] = s;
            }
        }
        Basis { cos, sin }
    }
}

/// Cached `c(n,k)` and `s(n,k)` tables in the same layout as the amplitudes.
#[derive(Debug, Clone)]
pub struct Basis {
    pub cos: AmplitudeMatrix,
    pub sin: AmplitudeMatrix,
}

/// Dense `N x K` real matrix, column-major by frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl AmplitudeMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds from column-major data (`data[k * rows + n] = m(n, k)`).
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(SfaError::LengthMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for k in 0..cols {
            for n in 0..rows {
                m.data[k * rows + n] = f(n, k);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, n: usize, k: usize) -> f64 {
        self.data[k * self.rows + n]
    }

    #[inline]
    pub fn set(&mut self, n: usize, k: usize, v: f64) {
        self.data[k * self.rows + n] = v;
    }

    pub fn col(&self, k: usize) -> &[f64] {
        &self.data[k * self.rows..(k + 1) * self.rows]
    }

    pub fn col_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.data[k * self.rows..(k + 1) * self.rows]
    }

    pub fn columns(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.rows.max(1))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `||self - other||_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| alpha * x + beta * y)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }
}

/// Which variational problem produced a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    /// Perfect reconstruction constraint.
    P0,
    /// Penalized data fidelity.
    P1,
}

/// Solver provenance stored with a decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveInfo {
    pub problem: ProblemKind,
    pub lam: f64,
    pub lam1: Option<f64>,
    pub mu: f64,
    pub mm_iters: usize,
    pub iterations: usize,
    pub converged: bool,
    /// `||u - a||_F + ||v - b||_F` at termination.
    pub primal_residual: f64,
    /// `max_n |x(n) - reconstruct(u, v)(n)|`; exact feasibility lives in the split copies.
    pub split_feasibility: f64,
    /// `max_n |x(n) - reconstruct(a, b)(n)|` for the reported amplitudes.
    pub feasibility_gap: f64,
    /// `||y - reconstruct(a, b)||_2`.
    pub residual_norm: f64,
    pub objective: f64,
}

/// Time-varying cosine/sine amplitudes on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub a: AmplitudeMatrix,
    pub b: AmplitudeMatrix,
    pub grid: FrequencyGrid,
    pub info: Option<SolveInfo>,
}

impl Decomposition {
    pub fn new(a: AmplitudeMatrix, b: AmplitudeMatrix, grid: FrequencyGrid) -> Result<Self> {
        if a.rows() != b.rows() || a.cols() != b.cols() {
            return Err(SfaError::Dimension(format!(
                "a is {}x{} but b is {}x{}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )));
        }
        if a.cols() != grid.len() {
            return Err(SfaError::Dimension(format!(
                "amplitudes have {} columns but grid has K = {}",
                a.cols(),
                grid.len()
            )));
        }
        if a.rows() < 2 {
            return Err(SfaError::SignalTooShort(a.rows()));
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(SfaError::NonFinite {
                context: "decomposition amplitudes".into(),
            });
        }
        Ok(Self {
            a,
            b,
            grid,
            info: None,
        })
    }

    pub fn with_info(mut self, info: SolveInfo) -> Self {
        self.info = Some(info);
        self
    }

    /// Signal length `N`.
    pub fn len(&self) -> usize {
        self.a.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.a.rows() == 0
    }

    /// Number of frequencies `K`.
    pub fn num_freqs(&self) -> usize {
        self.grid.len()
    }

    /// Contribution `a(n,k) c(n,k) + b(n,k) s(n,k)` of one frequency at one sample.
    #[inline]
    pub fn term(&self, n: usize, k: usize) -> f64 {
        let (s, c) = self.grid.phase(n, k).sin_cos();
        self.a.get(n, k) * c + self.b.get(n, k) * s
    }
}

/// Evaluates the sinusoidal model, summing frequencies in increasing `k`.
pub fn reconstruct(d: &Decomposition) -> Vec<f64> {
    (0..d.len())
        .map(|n| (0..d.num_freqs()).map(|k| d.term(n, k)).sum())
        .collect()
}

/// Per-frequency root energy `z_k = sqrt(||a_k||^2 + ||b_k||^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub z: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn l1(&self) -> f64 {
        self.z.iter().sum()
    }

    pub fn energy(&self) -> f64 {
        self.z.iter().map(|v| v * v).sum()
    }

    /// Indices sorted by decreasing `z_k` (ties by increasing index).
    pub fn ranked(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.z.len()).collect();
        idx.sort_by(|&i, &j| self.z[j].total_cmp(&self.z[i]).then(i.cmp(&j)));
        idx
    }

    /// Fraction of `sum z_k^2` carried by the given indices.
    pub fn energy_fraction(&self, indices: &[usize]) -> f64 {
        let total = self.energy();
        if total == 0.0 {
            return 0.0;
        }
        indices.iter().map(|&k| self.z[k] * self.z[k]).sum::<f64>() / total
    }
}

pub fn spectrum(d: &Decomposition) -> Spectrum {
    let z = d
        .a
        .columns()
        .zip(d.b.columns())
        .map(|(ac, bc)| column_norm(ac, bc))
        .collect();
    Spectrum { z }
}

#[inline]
pub(crate) fn column_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x * x + y * y)
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dft::dft_padded;
    use proptest::prelude::*;

    fn decomp(a: AmplitudeMatrix, b: AmplitudeMatrix, grid: FrequencyGrid) -> Decomposition {
        Decomposition::new(a, b, grid).unwrap()
    }

    #[test]
    fn signal_validation() {
        assert!(matches!(
            Signal::new(vec![1.0]),
            Err(SfaError::SignalTooShort(1))
        ));
        assert!(Signal::new(vec![1.0, f64::NAN]).is_err());
        assert!(Signal::with_rate(vec![1.0, 2.0], 0.0).is_err());
        let s = Signal::with_rate(vec![0.0, 1.0, 2.0], 100.0).unwrap();
        assert_eq!(s.time(2), 0.02);
    }

    #[test]
    fn grid_invariants() {
        assert!(FrequencyGrid::full(0).is_err());
        for g in [
            FrequencyGrid::full(7).unwrap(),
            FrequencyGrid::half(7).unwrap(),
        ] {
            let f = g.frequencies();
            assert_eq!(f[0], 0.0);
            assert!(f.windows(2).all(|w| w[0] < w[1]));
            assert!(*f.last().unwrap() < 1.0);
        }
        let h = FrequencyGrid::half(100).unwrap();
        assert!((h.freq(10) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn reconstruct_single_dc_column_is_identity() {
        let x = vec![0.3, -1.2, 2.5, 0.0, 4.0];
        let a = AmplitudeMatrix::from_col_major(5, 1, x.clone()).unwrap();
        let d = decomp(a, AmplitudeMatrix::zeros(5, 1), FrequencyGrid::full(1).unwrap());
        assert_eq!(reconstruct(&d), x);
    }

    #[test]
    fn reconstruct_zero() {
        let g = FrequencyGrid::full(3).unwrap();
        let d = decomp(AmplitudeMatrix::zeros(6, 3), AmplitudeMatrix::zeros(6, 3), g);
        assert!(reconstruct(&d).iter().all(|&v| v == 0.0));
        assert!(spectrum(&d).z.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn reconstruct_nyquist_column() {
        let g = FrequencyGrid::full(2).unwrap();
        let a = AmplitudeMatrix::from_fn(4, 2, |_, k| if k == 1 { 1.0 } else { 0.0 });
        let d = decomp(a, AmplitudeMatrix::zeros(4, 2), g);
        let y = reconstruct(&d);
        for (v, e) in y.iter().zip([1.0, -1.0, 1.0, -1.0]) {
            assert!((v - e).abs() < 1e-15);
        }
    }

    #[test]
    fn spectrum_single_column() {
        let g = FrequencyGrid::full(8).unwrap();
        let a = AmplitudeMatrix::from_fn(4, 8, |_, k| if k == 5 { 1.0 } else { 0.0 });
        let z = spectrum(&decomp(a, AmplitudeMatrix::zeros(4, 8), g)).z;
        for (k, v) in z.iter().enumerate() {
            assert_eq!(*v, if k == 5 { 2.0 } else { 0.0 });
        }
    }

    /// Constant columns on a 2N grid: K (a_k - j b_k) is the zero-padded DFT,
    /// and z_k is then sqrt(N) |X(k)| / K.
    #[test]
    fn constant_columns_match_zero_padded_dft() {
        let n = 16;
        let kk = 2 * n;
        let x: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        let xf = dft_padded(&x, kk).unwrap();
        let grid = FrequencyGrid::full(kk).unwrap();
        let a = AmplitudeMatrix::from_fn(n, kk, |_, k| xf[k].re / kk as f64);
        let b = AmplitudeMatrix::from_fn(n, kk, |_, k| -xf[k].im / kk as f64);
        let d = decomp(a, b, grid);
        for (r, e) in reconstruct(&d).iter().zip(&x) {
            assert!((r - e).abs() < 1e-10);
        }
        let z = spectrum(&d).z;
        for k in 0..kk {
            let expect = (n as f64).sqrt() * xf[k].norm() / kk as f64;
            assert!((z[k] - expect).abs() < 1e-10, "k={k}");
        }
    }

    fn small_decomp() -> impl Strategy<Value = (Decomposition, Decomposition)> {
        (2usize..8, 1usize..6).prop_flat_map(|(n, k)| {
            let m = prop::collection::vec(-5.0f64..5.0, n * k * 4);
            m.prop_map(move |v| {
                let g = FrequencyGrid::half(k).unwrap();
                let mk = |i: usize| {
                    AmplitudeMatrix::from_col_major(n, k, v[i * n * k..(i + 1) * n * k].to_vec())
                        .unwrap()
                };
                (
                    Decomposition::new(mk(0), mk(1), g).unwrap(),
                    Decomposition::new(mk(2), mk(3), g).unwrap(),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn reconstruct_is_linear((d1, d2) in small_decomp(), al in -3.0f64..3.0, be in -3.0f64..3.0) {
            let d = Decomposition::new(
                d1.a.combine(al, &d2.a, be),
                d1.b.combine(al, &d2.b, be),
                d1.grid,
            ).unwrap();
            let lhs = reconstruct(&d);
            let (r1, r2) = (reconstruct(&d1), reconstruct(&d2));
            for n in 0..lhs.len() {
                prop_assert!((lhs[n] - (al * r1[n] + be * r2[n])).abs() < 1e-9);
            }
        }

        #[test]
        fn spectrum_energy_identity((d, _) in small_decomp()) {
            let e = spectrum(&d).energy();
            let f = d.a.frobenius().powi(2) + d.b.frobenius().powi(2);
            prop_assert!((e - f).abs() <= 1e-10 * (1.0 + f));
        }
    }
}
