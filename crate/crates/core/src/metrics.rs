//! Error and phase-step measurements used to compare estimates with ground
//! truth and with the linear baselines.

use crate::band::wrap;

/// `||est - truth|| / ||truth||`.
pub fn relative_rmse(est: &[f64], truth: &[f64]) -> f64 {
    let err: f64 = est.iter().zip(truth).map(|(a, b)| (a - b) * (a - b)).sum();
    let norm: f64 = truth.iter().map(|v| v * v).sum();
    (err / norm).sqrt()
}

/// Wrapped first differences `wrap(theta[n] - theta[n-1])`, with 0 where
/// either sample is undefined. Entry `n` belongs to the step into sample `n`.
pub fn wrapped_increments(theta: &[f64]) -> Vec<f64> {
    let mut d = vec![0.0; theta.len()];
    for n in 1..theta.len() {
        let v = wrap(theta[n] - theta[n - 1]);
        d[n] = if v.is_finite() { v } else { 0.0 };
    }
    d
}

/// Sample index `n` and size of the largest `|wrap(theta[n] - theta[n-1])|`.
pub fn largest_jump(theta: &[f64]) -> Option<(usize, f64)> {
    wrapped_increments(theta)
        .into_iter()
        .enumerate()
        .skip(1)
        .fold(None, |best, (n, d)| match best {
            Some((_, b)) if f64::abs(b) >= d.abs() => best,
            _ => Some((n, d)),
        })
}

/// A phase step located near a given sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepTransition {
    /// Sample with the largest wrapped increment inside the window.
    pub location: usize,
    /// Post-level minus pre-level, radians.
    pub step: f64,
    /// First samples reaching 10% and 90% of the step.
    pub n10: usize,
    pub n90: usize,
}

impl StepTransition {
    /// `n90 - n10` in samples.
    pub fn span(&self) -> usize {
        self.n90.abs_diff(self.n10)
    }
}

/// Measures the step in `theta` inside `around ± half_width`. The phase is
/// followed through the window by accumulating wrapped increments; the pre
/// and post levels are the means of the first and last `level_len` samples
/// of that trajectory.
pub fn step_transition(
    theta: &[f64],
    around: usize,
    half_width: usize,
    level_len: usize,
) -> Option<StepTransition> {
    if theta.len() < 2 {
        return None;
    }
    let lo = around.saturating_sub(half_width);
    let hi = (around + half_width).min(theta.len() - 1);
    let level_len = level_len.max(1);
    if hi <= lo || hi - lo + 1 < 2 * level_len {
        return None;
    }
    let inc = wrapped_increments(theta);
    let location = (lo + 1..=hi).fold(lo + 1, |best, n| {
        if inc[n].abs() > inc[best].abs() {
            n
        } else {
            best
        }
    });
    let mut path = Vec::with_capacity(hi - lo + 1);
    let mut acc = 0.0;
    path.push(acc);
    for d in &inc[lo + 1..=hi] {
        acc += d;
        path.push(acc);
    }
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let pre = mean(&path[..level_len]);
    let post = mean(&path[path.len() - level_len..]);
    let step = post - pre;
    let reach = |frac: f64| {
        path.iter()
            .position(|&p| (p - pre) / step >= frac)
            .map_or(hi, |i| lo + i)
    };
    Some(StepTransition {
        location,
        step,
        n10: reach(0.1),
        n90: reach(0.9),
    })
}

/// Instantaneous phase of a complex signal relative to a carrier `omega`:
/// `wrap(arg z(n) - omega n)`.
pub fn demodulated_phase(z: &[num_complex::Complex64], omega: f64) -> Vec<f64> {
    z.iter()
        .enumerate()
        .map(|(n, v)| wrap(v.arg() - omega * n as f64))
        .collect()
}
