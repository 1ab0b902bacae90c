use serde::Serialize;

use crate::dft::dft_padded;
use crate::model::{AmplitudeMatrix, FrequencyGrid};

use super::config::InitStrategy;

/// ADMM iterates: amplitudes `(a, b)`, split copies `(u, v)` and scaled duals `(p, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub a: AmplitudeMatrix,
    pub b: AmplitudeMatrix,
    pub u: AmplitudeMatrix,
    pub v: AmplitudeMatrix,
    pub p: AmplitudeMatrix,
    pub q: AmplitudeMatrix,
    pub admm_iters: usize,
    pub mm_iters: usize,
    pub trace: Vec<TraceRow>,
}

/// One line of the per-iteration trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub iter: usize,
    pub objective: f64,
    pub primal_residual: f64,
    /// `max_n |x(n) - sum_k u c + v s|` for the split copies.
    pub feasibility_gap: f64,
    /// `||(a, b) - (a, b)_prev||_F / ||(a, b)||_F`.
    pub relative_change: f64,
}

impl SolverState {
    pub fn zeros(n: usize, k: usize) -> Self {
        let z = AmplitudeMatrix::zeros(n, k);
        Self {
            a: z.clone(),
            b: z.clone(),
            u: z.clone(),
            v: z.clone(),
            p: z.clone(),
            q: z,
            admm_iters: 0,
            mm_iters: 0,
            trace: Vec::new(),
        }
    }

    /// `a = b = p = q = 0`; `(u, v)` seeded from the signal.
    pub fn initialize(x: &[f64], grid: &FrequencyGrid, init: InitStrategy) -> Self {
        let mut st = Self::zeros(x.len(), grid.len());
        let (u, v) = match init {
            InitStrategy::Auto if grid.period() >= x.len() => dft_start(x, grid),
            _ => projection_start(x, grid),
        };
        st.u = u;
        st.v = v;
        st
    }

    pub fn is_finite(&self) -> bool {
        [&self.a, &self.b, &self.u, &self.v, &self.p, &self.q]
            .iter()
            .all(|m| m.is_finite())
    }

    /// `||u - a||_F + ||v - b||_F`.
    pub fn primal_residual(&self) -> f64 {
        self.u.distance(&self.a) + self.v.distance(&self.b)
    }
}

// Constant columns from the period-point zero-padded DFT. A bin whose
// conjugate partner is off the grid carries both halves (weight 2/M).
fn dft_start(x: &[f64], grid: &FrequencyGrid) -> (AmplitudeMatrix, AmplitudeMatrix) {
    let m = grid.period();
    let kk = grid.len();
    let xf = dft_padded(x, m).expect("period >= N checked by caller");
    let weight = |k: usize| {
        let partner = (m - k) % m;
        if partner < kk {
            1.0 / m as f64
        } else {
            2.0 / m as f64
        }
    };
    let n = x.len();
    let u = AmplitudeMatrix::from_fn(n, kk, |_, k| weight(k) * xf[k].re);
    let v = AmplitudeMatrix::from_fn(n, kk, |_, k| -weight(k) * xf[k].im);
    (u, v)
}

fn projection_start(x: &[f64], grid: &FrequencyGrid) -> (AmplitudeMatrix, AmplitudeMatrix) {
    let n = x.len();
    let scale = 2.0 / grid.len() as f64;
    let u = AmplitudeMatrix::from_fn(n, grid.len(), |i, k| scale * x[i] * grid.cos(i, k));
    let v = AmplitudeMatrix::from_fn(n, grid.len(), |i, k| scale * x[i] * grid.sin(i, k));
    (u, v)
}

/// Scratch for the MM update of `(u, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MmWorkspace {
    /// Column norms `Lambda_k` of the current `(u, v)`, before flooring.
    pub lambda: Vec<f64>,
    /// `V_k = Lambda_k / (2 mu Lambda_k + lam)`.
    pub v: Vec<f64>,
    /// `sum_k gamma(n, k)` per sample.
    pub gamma_sum: Vec<f64>,
    /// `alpha(n)` for the exact problem, `beta(n)` for the noisy one.
    pub multiplier: Vec<f64>,
}

impl MmWorkspace {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            lambda: vec![0.0; k],
            v: vec![0.0; k],
            gamma_sum: vec![0.0; n],
            multiplier: vec![0.0; n],
        }
    }
}
