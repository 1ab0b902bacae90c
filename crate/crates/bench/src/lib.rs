//! Reproduction experiments: λ sweeps over the example presets and the
//! phase-step comparison between the sparse decomposition and the LTI
//! baseline.

use std::f64::consts::PI;

use sfa_core::band::{inst_phase, merge_pair};
use sfa_core::baseline::{fft_bandpass, hilbert_analytic};
use sfa_core::metrics::{demodulated_phase, step_transition, StepTransition};
use sfa_core::synth::{example3_preset, gen_example3};
use sfa_core::{solve, spectrum, FrequencyGrid, ProblemKind, Result, Signal, SolverConfig};

/// `count` values from `lo` to `hi`, equally spaced in log scale.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let r = (hi / lo).ln() / (count - 1) as f64;
            (0..count).map(|i| lo * (r * i as f64).exp()).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub lam: f64,
    pub iterations: usize,
    pub converged: bool,
    pub objective: f64,
    /// Share of the spectral energy on the expected support.
    pub support_fraction: f64,
    /// Strongest frequency indices, in decreasing order.
    pub top: Vec<usize>,
}

/// Solves `x` once per `lam`, keeping every other setting of `base`.
pub fn lam_sweep(
    x: &Signal,
    grid: &FrequencyGrid,
    base: &SolverConfig,
    problem: ProblemKind,
    lams: &[f64],
    support: &[usize],
) -> Result<Vec<SweepPoint>> {
    lams.iter()
        .map(|&lam| {
            let cfg = SolverConfig { lam, ..base.clone() };
            let d = solve(x, grid, &cfg, problem)?.decomposition;
            let info = d.info.clone().expect("solver records info");
            let z = spectrum(&d);
            let mut top = z.ranked();
            top.truncate(support.len().max(4));
            Ok(SweepPoint {
                lam,
                iterations: info.iterations,
                converged: info.converged,
                objective: info.objective,
                support_fraction: z.energy_fraction(support),
                top,
            })
        })
        .collect()
}

/// Phase steps at the target jump of the Example 3 signal.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseComparison {
    pub sfa: Option<StepTransition>,
    pub lti: Option<StepTransition>,
}

/// Measures the target's phase step within ±10 samples of the jump, from the
/// merged pair straddling the target frequency and from the band-pass +
/// Hilbert baseline.
pub fn example3_comparison(seed: u64) -> Result<PhaseComparison> {
    let p = example3_preset();
    let y = gen_example3(seed)?.y;
    let jump = p.target.jump_index;
    let grid = FrequencyGrid::half(p.grid_size)?;
    let d = solve(&y, &grid, &p.solver, ProblemKind::P1)?.decomposition;
    let theta = inst_phase(&merge_pair(&d, p.pair_index)?)?.theta;
    Ok(PhaseComparison {
        sfa: step_transition(&theta, jump, 10, 5),
        lti: lti_step(y.samples(), jump)?,
    })
}

/// Step of the band-pass + Hilbert phase, demodulated at the target frequency.
pub fn lti_step(y: &[f64], jump: usize) -> Result<Option<StepTransition>> {
    let p = example3_preset();
    let bp = fft_bandpass(y, p.baseline_band.0, p.baseline_band.1)?;
    let theta = demodulated_phase(&hilbert_analytic(&bp), 2.0 * PI * p.target.freq);
    Ok(step_transition(&theta, jump, 10, 5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_space_endpoints() {
        let v = log_space(0.01, 100.0, 5);
        assert_eq!(v.len(), 5);
        assert!((v[0] - 0.01).abs() < 1e-15 && (v[4] - 100.0).abs() < 1e-10);
        assert!((v[2] - 1.0).abs() < 1e-12);
        assert!(log_space(1.0, 2.0, 0).is_empty());
    }

    #[test]
    fn sweep_on_a_steady_tone() {
        let grid = FrequencyGrid::half(20).unwrap();
        let x = Signal::new((0..20).map(|n| grid.cos(n, 4)).collect()).unwrap();
        let base = SolverConfig {
            mu: Some(5.0),
            max_admm_iters: 20000,
            ..SolverConfig::default()
        };
        let pts = lam_sweep(&x, &grid, &base, ProblemKind::P0, &[0.5, 2.0], &[4]).unwrap();
        for p in pts {
            assert!(p.converged);
            assert_eq!(p.top[0], 4);
            assert!(p.support_fraction > 0.99);
        }
    }
}
