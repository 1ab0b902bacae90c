//! Exact 1D total-variation denoising.
//!
//! Solves `argmin_x ||y - x||_2^2 + lam * TV(x)` with `TV(x) = sum |x(n) - x(n-1)|`,
//! using Condat's direct (non-iterative) algorithm. Condat's method minimizes
//! `0.5 ||y - x||^2 + l TV(x)`, so it is called with `l = lam / 2`.

/// Total variation `sum_{n>=1} |x(n) - x(n-1)|`.
pub fn tv(x: &[f64]) -> f64 {
    x.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// A TV denoising instance with the unhalved weight convention.
#[derive(Debug, Clone, PartialEq)]
pub struct TvdProblem {
    pub y: Vec<f64>,
    pub lam: f64,
}

impl TvdProblem {
    pub fn new(y: Vec<f64>, lam: f64) -> Self {
        Self { y, lam }
    }

    pub fn solve(&self) -> Vec<f64> {
        tvd(&self.y, self.lam)
    }
}

/// Returns the minimizer of `||y - x||^2 + lam * TV(x)`.
pub fn tvd(y: &[f64], lam: f64) -> Vec<f64> {
    let mut out = vec![0.0; y.len()];
    tvd_into(y, lam, &mut out);
    out
}

/// In-place variant of [`tvd`]; `out` must have the same length as `y`.
pub fn tvd_into(y: &[f64], lam: f64, out: &mut [f64]) {
    assert_eq!(y.len(), out.len(), "tvd_into: length mismatch");
    if y.len() <= 1 || lam <= 0.0 {
        out.copy_from_slice(y);
        return;
    }
    condat(y, out, 0.5 * lam);
}

// L. Condat, "A direct algorithm for 1D total variation denoising", 2013.
fn condat(input: &[f64], output: &mut [f64], lambda: f64) {
    let width = input.len();
    let last = width - 1;
    let (mut k, mut k0) = (0usize, 0usize);
    let (mut kplus, mut kminus) = (0usize, 0usize);
    let mut umin = lambda;
    let mut umax = -lambda;
    let mut vmin = input[0] - lambda;
    let mut vmax = input[0] + lambda;
    let twolambda = 2.0 * lambda;
    let minlambda = -lambda;

    loop {
        while k == last {
            if umin < 0.0 {
                fill(output, &mut k0, kminus, vmin);
                k = k0;
                kminus = k0;
                vmin = input[k0];
                umin = lambda;
                umax = vmin + umin - vmax;
            } else if umax > 0.0 {
                fill(output, &mut k0, kplus, vmax);
                k = k0;
                kplus = k0;
                vmax = input[k0];
                umax = minlambda;
                umin = vmax + umax - vmin;
            } else {
                vmin += umin / (k - k0 + 1) as f64;
                fill(output, &mut k0, k, vmin);
                return;
            }
        }
        umin += input[k + 1] - vmin;
        if umin < minlambda {
            fill(output, &mut k0, kminus, vmin);
            k = k0;
            kminus = k0;
            kplus = k0;
            vmin = input[k0];
            vmax = vmin + twolambda;
            umin = lambda;
            umax = minlambda;
            continue;
        }
        umax += input[k + 1] - vmax;
        if umax > lambda {
            fill(output, &mut k0, kplus, vmax);
            k = k0;
            kminus = k0;
            kplus = k0;
            vmax = input[k0];
            vmin = vmax - twolambda;
            umin = lambda;
            umax = minlambda;
        } else {
            k += 1;
            if umin >= lambda {
                kminus = k;
                vmin += (umin - lambda) / (kminus - k0 + 1) as f64;
                umin = lambda;
            }
            if umax <= minlambda {
                kplus = k;
                vmax += (umax + lambda) / (kplus - k0 + 1) as f64;
                umax = minlambda;
            }
        }
    }
}

// Writes `value` to output[k0..=upto] and advances k0 past it.
#[inline]
fn fill(output: &mut [f64], k0: &mut usize, upto: usize, value: f64) {
    output[*k0..=upto].fill(value);
    *k0 = upto + 1;
}

/// Largest violation of the first-order optimality conditions of
/// `||y - x||^2 + lam TV(x)` at `x`.
///
/// With `S(n) = sum_{m<=n} 2 (x(m) - y(m))` a minimizer satisfies
/// `|S(n)| <= lam` for `n < N-1`, `S(N-1) = 0`, and
/// `S(n) = lam * sign(x(n+1) - x(n))` wherever the output jumps.
pub fn optimality_violation(y: &[f64], x: &[f64], lam: f64) -> f64 {
    assert_eq!(y.len(), x.len());
    let n = y.len();
    let mut worst = 0.0_f64;
    let mut s = 0.0;
    for i in 0..n {
        s += 2.0 * (x[i] - y[i]);
        if i + 1 == n {
            worst = worst.max(s.abs());
        } else {
            worst = worst.max(s.abs() - lam);
            let d = x[i + 1] - x[i];
            if d != 0.0 {
                worst = worst.max((s - lam * d.signum()).abs());
            }
        }
    }
    worst
}
