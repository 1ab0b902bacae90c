//! The three ADMM sub-steps: TV denoising of the amplitudes, the MM update of
//! the split variables, and the scaled dual ascent.

use rayon::prelude::*;

use crate::error::{Result, SfaError};
use crate::model::{column_norm, Basis};
use crate::tvd::tvd_into;

use super::state::{MmWorkspace, SolverState};

// Samples per parallel task in the per-sample reductions.
const SAMPLE_CHUNK: usize = 256;

/// How the reconstruction enters the split-variable subproblem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fidelity {
    /// `sum_k u c + v s = x` enforced exactly.
    Exact,
    /// `lam1 * ||y - sum_k u c + v s||^2` added to the objective.
    Penalized { lam1: f64 },
}

/// `a_k = tvd(u_k - p_k, 1/mu)`, `b_k = tvd(v_k - q_k, 1/mu)` for every column.
pub fn admm_ab_step(state: &mut SolverState, mu: f64) {
    let n = state.a.rows();
    if n == 0 {
        return;
    }
    let weight = 1.0 / mu;
    let SolverState {
        a, b, u, v, p, q, ..
    } = state;
    let denoise = |(out, (src, dual)): (&mut [f64], (&[f64], &[f64])), buf: &mut Vec<f64>| {
        buf.clear();
        buf.extend(src.iter().zip(dual).map(|(s, d)| s - d));
        tvd_into(buf, weight, out);
    };
    a.as_mut_slice()
        .par_chunks_mut(n)
        .zip(u.as_slice().par_chunks(n).zip(p.as_slice().par_chunks(n)))
        .for_each_init(Vec::new, |buf, item| denoise(item, buf));
    b.as_mut_slice()
        .par_chunks_mut(n)
        .zip(v.as_slice().par_chunks(n).zip(q.as_slice().par_chunks(n)))
        .for_each_init(Vec::new, |buf, item| denoise(item, buf));
}

/// `p <- p - (u - a)`, `q <- q - (v - b)`.
pub fn dual_update(state: &mut SolverState) {
    let SolverState {
        a, b, u, v, p, q, ..
    } = state;
    for ((pi, ui), ai) in p.as_mut_slice().iter_mut().zip(u.as_slice()).zip(a.as_slice()) {
        *pi -= ui - ai;
    }
    for ((qi, vi), bi) in q.as_mut_slice().iter_mut().zip(v.as_slice()).zip(b.as_slice()) {
        *qi -= vi - bi;
    }
}

/// Floor applied to `Lambda_k` inside `V_k` so that a vanished column can recover.
pub fn lambda_floor(x: &[f64]) -> f64 {
    1e-12 * (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// One MM iteration for the split-variable subproblem.
pub fn mm_iteration(
    x: &[f64],
    basis: &Basis,
    state: &mut SolverState,
    ws: &mut MmWorkspace,
    lam: f64,
    mu: f64,
    fidelity: Fidelity,
) -> Result<()> {
    let n = x.len();
    let kk = basis.cos.cols();
    let floor = lambda_floor(x);
    for k in 0..kk {
        let norm = column_norm(state.u.col(k), state.v.col(k));
        ws.lambda[k] = norm;
        let l = norm.max(floor);
        ws.v[k] = l / (2.0 * mu * l + lam);
    }
    let vsum: f64 = ws.v.iter().sum();
    let denom = match fidelity {
        Fidelity::Exact => vsum,
        Fidelity::Penalized { lam1 } => 0.5 / lam1 + vsum,
    };
    if !(denom.is_finite() && denom > 0.0) {
        return Err(SfaError::DegenerateScale(0));
    }

    let SolverState {
        a, b, u, v, p, q, ..
    } = state;
    let (a, b, p, q) = (&*a, &*b, &*p, &*q);
    let vk = &ws.v;

    // gamma_sum[n] = sum_k V_k [c (a + p) + s (b + q)], summed in increasing k.
    ws.gamma_sum
        .par_chunks_mut(SAMPLE_CHUNK)
        .enumerate()
        .for_each(|(ci, chunk)| {
            let n0 = ci * SAMPLE_CHUNK;
            chunk.fill(0.0);
            for (k, &w) in vk.iter().enumerate() {
                let (c, s) = (basis.cos.col(k), basis.sin.col(k));
                let (ac, bc, pc, qc) = (a.col(k), b.col(k), p.col(k), q.col(k));
                for (j, g) in chunk.iter_mut().enumerate() {
                    let i = n0 + j;
                    *g += w * (c[i] * (ac[i] + pc[i]) + s[i] * (bc[i] + qc[i]));
                }
            }
        });
    for ((m, &xi), &g) in ws.multiplier.iter_mut().zip(x).zip(&ws.gamma_sum) {
        *m = (xi - 2.0 * mu * g) / denom;
    }

    let mult = &ws.multiplier;
    u.as_mut_slice()
        .par_chunks_mut(n)
        .zip(v.as_mut_slice().par_chunks_mut(n))
        .enumerate()
        .for_each(|(k, (uc, vc))| {
            let w = vk[k];
            let (c, s) = (basis.cos.col(k), basis.sin.col(k));
            let (ac, bc, pc, qc) = (a.col(k), b.col(k), p.col(k), q.col(k));
            for i in 0..n {
                uc[i] = w * (mult[i] * c[i] + 2.0 * mu * (ac[i] + pc[i]));
                vc[i] = w * (mult[i] * s[i] + 2.0 * mu * (bc[i] + qc[i]));
            }
        });
    state.mm_iters += 1;
    Ok(())
}

/// Objective of the split-variable subproblem at the current `(u, v)`:
/// `lam sum_k ||(u_k, v_k)|| + mu ||u - a - p||^2 + mu ||v - b - q||^2`,
/// plus `lam1 ||x - sum_k u c + v s||^2` when the fidelity is penalized.
pub fn split_objective(
    x: &[f64],
    basis: &Basis,
    state: &SolverState,
    lam: f64,
    mu: f64,
    fidelity: Fidelity,
) -> f64 {
    let kk = basis.cos.cols();
    let mut total = 0.0;
    for k in 0..kk {
        let (uc, vc) = (state.u.col(k), state.v.col(k));
        total += lam * column_norm(uc, vc);
        let (ac, bc, pc, qc) = (state.a.col(k), state.b.col(k), state.p.col(k), state.q.col(k));
        let mut quad = 0.0;
        for i in 0..uc.len() {
            let du = uc[i] - ac[i] - pc[i];
            let dv = vc[i] - bc[i] - qc[i];
            quad += du * du + dv * dv;
        }
        total += mu * quad;
    }
    if let Fidelity::Penalized { lam1 } = fidelity {
        let r = split_residual(x, basis, state);
        total += lam1 * r.iter().map(|e| e * e).sum::<f64>();
    }
    total
}

/// `x(n) - sum_k [u c + v s](n)`.
pub fn split_residual(x: &[f64], basis: &Basis, state: &SolverState) -> Vec<f64> {
    let mut r = x.to_vec();
    for k in 0..basis.cos.cols() {
        let (c, s) = (basis.cos.col(k), basis.sin.col(k));
        let (uc, vc) = (state.u.col(k), state.v.col(k));
        for i in 0..r.len() {
            r[i] -= uc[i] * c[i] + vc[i] * s[i];
        }
    }
    r
}

/// Right-hand side of the quadratic majorizer of a column norm,
/// `(||u_k||^2 + ||v_k||^2) / (2 Lambda) + Lambda / 2`.
pub fn norm_majorizer(u: &[f64], v: &[f64], anchor: f64) -> f64 {
    let sq: f64 = u.iter().zip(v).map(|(a, b)| a * a + b * b).sum();
    sq / (2.0 * anchor) + 0.5 * anchor
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FrequencyGrid;
    use crate::model::AmplitudeMatrix;
    use crate::tvd::tvd;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, k: usize, seed: u64) -> SolverState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = || AmplitudeMatrix::from_fn(n, k, |_, _| rng.gen_range(-1.0..1.0));
        let mut st = SolverState::zeros(n, k);
        st.a = m();
        st.b = m();
        st.u = m();
        st.v = m();
        st.p = m();
        st.q = m();
        st
    }

    #[test]
    fn ab_step_constant_column_is_fixed() {
        let mut st = SolverState::zeros(5, 2);
        st.u.col_mut(1).fill(3.0);
        st.p.col_mut(1).fill(0.5);
        admm_ab_step(&mut st, 0.01);
        assert!(st.a.col(1).iter().all(|&v| (v - 2.5).abs() < 1e-14));
    }

    #[test]
    fn ab_step_large_mu_copies() {
        let mut st = random_state(6, 3, 1);
        admm_ab_step(&mut st, f64::INFINITY);
        for i in 0..st.a.as_slice().len() {
            assert_eq!(st.a.as_slice()[i], st.u.as_slice()[i] - st.p.as_slice()[i]);
        }
    }

    #[test]
    fn ab_step_matches_per_column_tvd() {
        let mut st = random_state(8, 3, 2);
        let expect: Vec<Vec<f64>> = (0..3)
            .map(|k| {
                let y: Vec<f64> = st.v.col(k).iter().zip(st.q.col(k)).map(|(a, b)| a - b).collect();
                tvd(&y, 1.0)
            })
            .collect();
        admm_ab_step(&mut st, 1.0);
        for k in 0..3 {
            assert_eq!(st.b.col(k), expect[k].as_slice());
        }
    }

    #[test]
    fn dual_update_cases() {
        let mut st = random_state(4, 2, 3);
        st.u = st.a.clone();
        st.v = st.b.clone();
        let (p0, q0) = (st.p.clone(), st.q.clone());
        dual_update(&mut st);
        assert_eq!((&st.p, &st.q), (&p0, &q0));

        let mut st = SolverState::zeros(3, 1);
        st.u.col_mut(0).copy_from_slice(&[1.0, 2.0, 3.0]);
        dual_update(&mut st);
        assert_eq!(st.p.col(0), &[-1.0, -2.0, -3.0]);
        dual_update(&mut st);
        assert_eq!(st.p.col(0), &[-2.0, -4.0, -6.0]);
    }

    #[test]
    fn mm_fixed_point_without_sparsity() {
        // lam -> 0 and a feasible (a + p, b + q): alpha = 0, u = a + p.
        let n = 6;
        let grid = FrequencyGrid::full(4).unwrap();
        let basis = grid.basis(n);
        let mut st = random_state(n, 4, 4);
        let mut x = vec![0.0; n];
        for k in 0..4 {
            for i in 0..n {
                x[i] += (st.a.get(i, k) + st.p.get(i, k)) * basis.cos.get(i, k)
                    + (st.b.get(i, k) + st.q.get(i, k)) * basis.sin.get(i, k);
            }
        }
        let mut ws = MmWorkspace::new(n, 4);
        mm_iteration(&x, &basis, &mut st, &mut ws, 1e-300, 1.0, Fidelity::Exact).unwrap();
        for k in 0..4 {
            for i in 0..n {
                assert!((st.u.get(i, k) - st.a.get(i, k) - st.p.get(i, k)).abs() < 1e-12);
                assert!((st.v.get(i, k) - st.b.get(i, k) - st.q.get(i, k)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mm_single_dc_column_reproduces_signal() {
        let x = vec![0.5, -1.0, 2.0, 4.0];
        let grid = FrequencyGrid::full(1).unwrap();
        let basis = grid.basis(4);
        let mut st = random_state(4, 1, 5);
        let mut ws = MmWorkspace::new(4, 1);
        mm_iteration(&x, &basis, &mut st, &mut ws, 0.7, 1.3, Fidelity::Exact).unwrap();
        for i in 0..4 {
            assert!((st.u.get(i, 0) - x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn mm_keeps_exact_constraint() {
        let n = 7;
        let grid = FrequencyGrid::half(5).unwrap();
        let basis = grid.basis(n);
        let mut st = random_state(n, 5, 6);
        let x: Vec<f64> = (0..n).map(|i| (i as f64).cos() * 3.0).collect();
        let mut ws = MmWorkspace::new(n, 5);
        for _ in 0..4 {
            mm_iteration(&x, &basis, &mut st, &mut ws, 0.3, 0.8, Fidelity::Exact).unwrap();
            let r = split_residual(&x, &basis, &st);
            assert!(r.iter().all(|e| e.abs() <= 1e-9 * 3.0));
            assert!(ws.v.iter().all(|&v| (0.0..1.0 / 1.6).contains(&v)));
        }
    }

    #[test]
    fn penalized_approaches_exact_for_large_lam1() {
        let n = 6;
        let grid = FrequencyGrid::half(4).unwrap();
        let basis = grid.basis(n);
        let x: Vec<f64> = (0..n).map(|i| 1.0 - 0.3 * i as f64).collect();
        let mut s0 = random_state(n, 4, 7);
        let mut s1 = s0.clone();
        let mut ws = MmWorkspace::new(n, 4);
        mm_iteration(&x, &basis, &mut s0, &mut ws, 0.5, 1.0, Fidelity::Exact).unwrap();
        mm_iteration(&x, &basis, &mut s1, &mut ws, 0.5, 1.0, Fidelity::Penalized { lam1: 1e8 })
            .unwrap();
        assert!(s0.u.distance(&s1.u) < 1e-4 && s0.v.distance(&s1.v) < 1e-4);
    }

    #[test]
    fn penalized_with_vanishing_fidelity_and_zero_anchor_gives_zero() {
        let n = 5;
        let grid = FrequencyGrid::half(3).unwrap();
        let basis = grid.basis(n);
        let mut st = SolverState::zeros(n, 3);
        st.u.as_mut_slice().fill(0.3);
        let mut ws = MmWorkspace::new(n, 3);
        let x = vec![1.0; n];
        mm_iteration(&x, &basis, &mut st, &mut ws, 1.0, 1.0, Fidelity::Penalized { lam1: 1e-12 })
            .unwrap();
        assert!(st.u.frobenius() < 1e-10 && st.v.frobenius() < 1e-10);
    }

    #[test]
    fn majorizer_touches_at_anchor() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let u: Vec<f64> = (0..9).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let v: Vec<f64> = (0..9).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let norm = column_norm(&u, &v);
            assert!((norm_majorizer(&u, &v, norm) - norm).abs() <= 1e-12 * (1.0 + norm));
            // and it lies above the norm elsewhere
            assert!(norm_majorizer(&u, &v, 2.0 * norm + 0.1) >= norm);
        }
    }
}
