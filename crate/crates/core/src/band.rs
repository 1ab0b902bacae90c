//! Narrow-band components of a decomposition.
//!
//! A band `S` of frequency indices is reconstructed as
//! `g_S(n) = sum_{k in S} a(n,k) c(n,k) + b(n,k) s(n,k)`. Bands made of
//! pairs placed symmetrically around a center `w_M` can be rewritten around
//! that single frequency,
//!
//! ```text
//! g_S(n) = a_M(n) cos(w_M n) + b_M(n) sin(w_M n)
//! ```
//!
//! which gives the complex envelope `a_M - j b_M` and the instantaneous phase
//! `atan2(-b_M, a_M)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Result, SfaError};
use crate::model::Decomposition;

/// A reconstructed band, optionally with its merged amplitude pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BandComponent {
    pub samples: Vec<f64>,
    /// Radians/sample.
    pub center_omega: f64,
    pub am: Option<Vec<f64>>,
    pub bm: Option<Vec<f64>>,
    pub grid_indices: Vec<usize>,
}

/// Wrapped instantaneous phase. `mask[n]` is set (and `theta[n]` is NaN)
/// where the merged amplitudes are both zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSeries {
    pub theta: Vec<f64>,
    pub center_omega: f64,
    pub mask: Vec<bool>,
}

/// Where the common frequency of a merged band sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BandCenter {
    /// The middle grid index; the band must have odd size.
    #[default]
    GridPoint,
    /// The midpoint of the outer frequencies; any size.
    Midpoint,
}

fn check_indices(d: &Decomposition, s: &[usize]) -> Result<()> {
    if s.is_empty() {
        return Err(SfaError::EmptyIndexSet);
    }
    let size = d.num_freqs();
    match s.iter().find(|&&k| k >= size) {
        Some(&index) => Err(SfaError::IndexOutOfRange { index, size }),
        None => Ok(()),
    }
}

fn band_sum(d: &Decomposition, s: &[usize], weight: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; d.len()];
    for &k in s {
        let w = weight(k);
        if w == 0.0 {
            continue;
        }
        for (n, o) in out.iter_mut().enumerate() {
            *o += w * d.term(n, k);
        }
    }
    out
}

/// Plain reconstruction from the indices in `s`.
pub fn extract_band(d: &Decomposition, s: &[usize]) -> Result<BandComponent> {
    check_indices(d, s)?;
    let center_omega = s.iter().map(|&k| d.grid.omega(k)).sum::<f64>() / s.len() as f64;
    Ok(BandComponent {
        samples: band_sum(d, s, |_| 1.0),
        center_omega,
        am: None,
        bm: None,
        grid_indices: s.to_vec(),
    })
}

/// `sum_k |h_k| (a c + b s)(n, k)`.
pub fn weighted_reconstruct(d: &Decomposition, h: &[f64]) -> Result<Vec<f64>> {
    if h.len() != d.num_freqs() {
        return Err(SfaError::LengthMismatch {
            expected: d.num_freqs(),
            got: h.len(),
        });
    }
    if let Some(k) = h.iter().position(|v| !v.is_finite()) {
        return Err(SfaError::NonFinite {
            context: format!("weight {k}"),
        });
    }
    let all: Vec<usize> = (0..h.len()).collect();
    Ok(band_sum(d, &all, |k| h[k].abs()))
}

// Adds the pair (lo, hi) rewritten around `omega_m` into (am, bm).
fn accumulate_pair(d: &Decomposition, lo: usize, hi: usize, omega_m: f64, am: &mut [f64], bm: &mut [f64]) {
    let dw = (d.grid.omega(hi) - d.grid.omega(lo)) / 2.0;
    let (al, bl, ah, bh) = (d.a.col(lo), d.b.col(lo), d.a.col(hi), d.b.col(hi));
    // Inner pairs can sit a rounding error away from omega_m.
    let shift = (d.grid.omega(hi) + d.grid.omega(lo)) / 2.0 - omega_m;
    for n in 0..am.len() {
        let t = n as f64;
        let (s, c) = (dw * t).sin_cos();
        let pa = (al[n] + ah[n]) * c - (bl[n] - bh[n]) * s;
        let pb = (bl[n] + bh[n]) * c + (al[n] - ah[n]) * s;
        if shift == 0.0 {
            am[n] += pa;
            bm[n] += pb;
        } else {
            let (ss, sc) = (shift * t).sin_cos();
            am[n] += pa * sc + pb * ss;
            bm[n] += pb * sc - pa * ss;
        }
    }
}

fn finish(d: &Decomposition, s: Vec<usize>, omega_m: f64, am: Vec<f64>, bm: Vec<f64>) -> BandComponent {
    let samples = am
        .iter()
        .zip(&bm)
        .enumerate()
        .map(|(n, (a, b))| {
            let (s, c) = (omega_m * n as f64).sin_cos();
            a * c + b * s
        })
        .collect();
    debug_assert_eq!(d.len(), am.len());
    BandComponent {
        samples,
        center_omega: omega_m,
        am: Some(am),
        bm: Some(bm),
        grid_indices: s,
    }
}

/// Merges indices `m` and `m + 1` around their midpoint frequency.
pub fn merge_pair(d: &Decomposition, m: usize) -> Result<BandComponent> {
    check_indices(d, &[m, m + 1])?;
    let omega_m = (d.grid.omega(m) + d.grid.omega(m + 1)) / 2.0;
    let mut am = vec![0.0; d.len()];
    let mut bm = vec![0.0; d.len()];
    accumulate_pair(d, m, m + 1, omega_m, &mut am, &mut bm);
    Ok(finish(d, vec![m, m + 1], omega_m, am, bm))
}

/// Merges the contiguous band `s` around a single center frequency by
/// nesting symmetric pairs (plus the middle index for odd sizes).
pub fn merge_band(d: &Decomposition, s: &[usize], center: BandCenter) -> Result<BandComponent> {
    check_indices(d, s)?;
    let mut idx = s.to_vec();
    idx.sort_unstable();
    if idx.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(SfaError::NonContiguous);
    }
    let (lo, hi) = (idx[0], idx[idx.len() - 1]);
    let odd = idx.len() % 2 == 1;
    if center == BandCenter::GridPoint && !odd {
        return Err(SfaError::EvenCardinality { lo, hi });
    }
    let omega_m = (d.grid.omega(lo) + d.grid.omega(hi)) / 2.0;
    let mut am = vec![0.0; d.len()];
    let mut bm = vec![0.0; d.len()];
    if odd {
        let c = (lo + hi) / 2;
        am.copy_from_slice(d.a.col(c));
        bm.copy_from_slice(d.b.col(c));
    }
    for j in 0..idx.len() / 2 {
        accumulate_pair(d, lo + j, hi - j, omega_m, &mut am, &mut bm);
    }
    Ok(finish(d, idx, omega_m, am, bm))
}

/// Positive-frequency envelope `a_M - j b_M`.
pub fn analytic(bc: &BandComponent) -> Result<Vec<Complex64>> {
    let (am, bm) = merged(bc)?;
    Ok(am.iter().zip(bm).map(|(&a, &b)| Complex64::new(a, -b)).collect())
}

/// `atan2(-b_M, a_M)` per sample.
pub fn inst_phase(bc: &BandComponent) -> Result<PhaseSeries> {
    let (am, bm) = merged(bc)?;
    let mask: Vec<bool> = am.iter().zip(bm).map(|(&a, &b)| a == 0.0 && b == 0.0).collect();
    let theta = am
        .iter()
        .zip(bm)
        .zip(&mask)
        .map(|((&a, &b), &m)| if m { f64::NAN } else { wrap((-b).atan2(a)) })
        .collect();
    Ok(PhaseSeries {
        theta,
        center_omega: bc.center_omega,
        mask,
    })
}

fn merged(bc: &BandComponent) -> Result<(&[f64], &[f64])> {
    match (&bc.am, &bc.bm) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(SfaError::MissingMerge),
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// `wrap(theta_1 - theta_2)`; masked samples give NaN.
pub fn phase_difference(p1: &PhaseSeries, p2: &PhaseSeries) -> Result<Vec<f64>> {
    if p1.theta.len() != p2.theta.len() {
        return Err(SfaError::LengthMismatch {
            expected: p1.theta.len(),
            got: p2.theta.len(),
        });
    }
    let scale = p1.center_omega.abs().max(p2.center_omega.abs()).max(1.0);
    if (p1.center_omega - p2.center_omega).abs() > 1e-12 * scale {
        return Err(SfaError::CenterMismatch(p1.center_omega, p2.center_omega));
    }
    Ok(p1
        .theta
        .iter()
        .zip(&p2.theta)
        .map(|(a, b)| wrap(a - b))
        .collect())
}

/// Sliding phase-locking value `|mean exp(j delta)|` over a centered window
/// of `window` samples, truncated at the edges. Non-finite entries are skipped.
pub fn plv(delta: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 || window > delta.len() {
        return Err(SfaError::WindowTooLarge {
            window,
            len: delta.len(),
        });
    }
    let before = (window - 1) / 2;
    let after = window / 2;
    let out = (0..delta.len())
        .map(|n| {
            let lo = n.saturating_sub(before);
            let hi = (n + after).min(delta.len() - 1);
            let (mut sum, mut count) = (Complex64::new(0.0, 0.0), 0usize);
            for &d in delta[lo..=hi].iter().filter(|d| d.is_finite()) {
                sum += Complex64::from_polar(1.0, d);
                count += 1;
            }
            if count == 0 {
                f64::NAN
            } else {
                (sum.norm() / count as f64).min(1.0)
            }
        })
        .collect();
    Ok(out)
}
