//! Reference solvers written independently of the library code paths.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// TV denoising `min ||y-x||^2 + lam TV(x)` through its dual
/// `min_{|z|<=lam} ||y - D^T z / 2||^2`, solved by coordinate descent and
/// then made exact with primal-dual active-set steps.
pub fn tvd_dual(y: &[f64], lam: f64) -> Vec<f64> {
    let n = y.len();
    if n < 2 || lam <= 0.0 {
        return y.to_vec();
    }
    let m = n - 1;
    let dy: Vec<f64> = (0..m).map(|i| y[i + 1] - y[i]).collect();
    let mut z = vec![0.0; m];
    for _ in 0..2000 {
        for i in 0..m {
            let left = if i > 0 { z[i - 1] } else { 0.0 };
            let right = if i + 1 < m { z[i + 1] } else { 0.0 };
            z[i] = (dy[i] + 0.5 * (left + right)).clamp(-lam, lam);
        }
    }
    // Dual in standard form: min z'Qz/2 - b'z with Q = D D^T / 2 and b = D y.
    let q = |i: usize, j: usize| -> f64 {
        if i == j {
            1.0
        } else if i.abs_diff(j) == 1 {
            -0.5
        } else {
            0.0
        }
    };
    for _ in 0..100 {
        let g: Vec<f64> = (0..m)
            .map(|i| (0..m).map(|j| q(i, j) * z[j]).sum::<f64>() - dy[i])
            .collect();
        // +1 upper bound active, -1 lower, 0 free.
        let state: Vec<i8> = (0..m)
            .map(|i| {
                let t = z[i] - g[i];
                if t > lam {
                    1
                } else if t < -lam {
                    -1
                } else {
                    0
                }
            })
            .collect();
        let free: Vec<usize> = (0..m).filter(|&i| state[i] == 0).collect();
        let mut next: Vec<f64> = (0..m).map(|i| lam * state[i] as f64).collect();
        if !free.is_empty() {
            let a = DMatrix::from_fn(free.len(), free.len(), |r, c| q(free[r], free[c]));
            let rhs = DVector::from_fn(free.len(), |r, _| {
                let i = free[r];
                dy[i] - (0..m)
                    .filter(|&j| state[j] != 0)
                    .map(|j| q(i, j) * next[j])
                    .sum::<f64>()
            });
            let sol = a.lu().solve(&rhs).expect("tridiagonal M-matrix is nonsingular");
            for (r, &i) in free.iter().enumerate() {
                next[i] = sol[r];
            }
        }
        let moved = next.iter().zip(&z).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        z = next;
        if moved == 0.0 {
            break;
        }
    }
    (0..n)
        .map(|i| {
            let dtz = if i == 0 { -z[0] } else if i == m { z[m - 1] } else { z[i - 1] - z[i] };
            y[i] - 0.5 * dtz
        })
        .collect()
}

/// Minimizer of the quadratic MM surrogate for one sample under the exact
/// constraint `sum_k c_k u_k + s_k v_k = x`:
/// `min sum_k w_k (u_k^2 + v_k^2) + mu (u_k - ra_k)^2 + mu (v_k - rb_k)^2`,
/// by projected gradient onto the constraint hyperplane.
pub fn mm_sample_exact(
    x: f64,
    c: &[f64],
    s: &[f64],
    w: &[f64],
    mu: f64,
    ra: &[f64],
    rb: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let k = c.len();
    let hh: f64 = c.iter().chain(s).map(|v| v * v).sum();
    let project = |u: &mut [f64], v: &mut [f64]| {
        let r: f64 = x - (0..k).map(|j| c[j] * u[j] + s[j] * v[j]).sum::<f64>();
        for j in 0..k {
            u[j] += r * c[j] / hh;
            v[j] += r * s[j] / hh;
        }
    };
    let lip = 2.0 * w.iter().fold(0.0_f64, |m, &v| m.max(v)) + 2.0 * mu;
    let step = 1.0 / lip;
    let mut u = ra.to_vec();
    let mut v = rb.to_vec();
    project(&mut u, &mut v);
    for _ in 0..20000 {
        let mut delta = 0.0_f64;
        for j in 0..k {
            let gu = 2.0 * w[j] * u[j] + 2.0 * mu * (u[j] - ra[j]);
            let gv = 2.0 * w[j] * v[j] + 2.0 * mu * (v[j] - rb[j]);
            u[j] -= step * gu;
            v[j] -= step * gv;
            delta = delta.max((step * gu).abs()).max((step * gv).abs());
        }
        project(&mut u, &mut v);
        if delta < 1e-15 {
            break;
        }
    }
    (u, v)
}

/// Same surrogate with the penalty `lam1 (x - sum c u + s v)^2` instead of the
/// constraint, solved as a dense `2K x 2K` linear system.
pub fn mm_sample_penalized(
    x: f64,
    c: &[f64],
    s: &[f64],
    w: &[f64],
    mu: f64,
    lam1: f64,
    ra: &[f64],
    rb: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let k = c.len();
    let h = DVector::from_fn(2 * k, |i, _| if i < k { c[i] } else { s[i - k] });
    let diag = DVector::from_fn(2 * k, |i, _| 2.0 * (w[i % k] + mu));
    let a = DMatrix::from_diagonal(&diag) + 2.0 * lam1 * &h * h.transpose();
    let rhs = DVector::from_fn(2 * k, |i, _| {
        let r = if i < k { ra[i] } else { rb[i - k] };
        2.0 * mu * r + 2.0 * lam1 * x * h[i]
    });
    let z = a.lu().solve(&rhs).expect("positive definite");
    (z.rows(0, k).iter().copied().collect(), z.rows(k, k).iter().copied().collect())
}
