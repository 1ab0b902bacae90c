//! Synthetic test signals: sums of sinusoids with a single amplitude/phase
//! jump each, plus seeded white Gaussian noise.
//!
//! Preset parameters live in `presets/*.json` and are compiled in, so the
//! files and the code cannot drift apart.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SfaError};
use crate::model::Signal;
use crate::solver::SolverConfig;

/// A sinusoid `A cos(2 pi f n + phi)` whose amplitude and phase switch at `jump_index`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpSinusoidSpec {
    /// Normalized frequency in cycles/sample.
    pub freq: f64,
    pub amp_before: f64,
    pub amp_after: f64,
    /// Radians.
    pub phase_before: f64,
    pub phase_after: f64,
    /// First sample using the "after" parameters.
    pub jump_index: usize,
}

impl JumpSinusoidSpec {
    pub fn steady(freq: f64, amp: f64, phase: f64) -> Self {
        Self {
            freq,
            amp_before: amp,
            amp_after: amp,
            phase_before: phase,
            phase_after: phase,
            jump_index: 0,
        }
    }

    pub fn validate(&self, len: usize) -> Result<()> {
        if !(0.0..0.5).contains(&self.freq) {
            return Err(SfaError::Config {
                field: "freq",
                reason: format!("{} not in [0, 0.5)", self.freq),
            });
        }
        if self.jump_index >= len {
            return Err(SfaError::Config {
                field: "jump_index",
                reason: format!("{} not below N = {len}", self.jump_index),
            });
        }
        Ok(())
    }

    pub fn sample(&self, n: usize) -> f64 {
        let (amp, phase) = if n < self.jump_index {
            (self.amp_before, self.phase_before)
        } else {
            (self.amp_after, self.phase_after)
        };
        amp * (2.0 * PI * self.freq * n as f64 + phase).cos()
    }

    pub fn render(&self, len: usize) -> Vec<f64> {
        (0..len).map(|n| self.sample(n)).collect()
    }
}

/// Sum of jump sinusoids together with each component's ground truth.
#[derive(Debug, Clone)]
pub struct JumpSum {
    pub signal: Signal,
    pub components: Vec<Vec<f64>>,
}

pub fn gen_jump_sum(specs: &[JumpSinusoidSpec], len: usize, sample_rate: f64) -> Result<JumpSum> {
    for s in specs {
        s.validate(len)?;
    }
    let components: Vec<Vec<f64>> = specs.iter().map(|s| s.render(len)).collect();
    let samples = (0..len)
        .map(|n| components.iter().map(|c| c[n]).sum())
        .collect();
    Ok(JumpSum {
        signal: Signal::with_rate(samples, sample_rate)?,
        components,
    })
}

/// Seeded i.i.d. `N(0, sigma^2)` samples (ChaCha20 stream,
/// `rand_distr::Normal`).
pub fn white_noise(len: usize, sigma: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma.max(0.0)).expect("finite sigma");
    (0..len).map(|_| normal.sample(&mut rng)).collect()
}

/// Three jump sinusoids on a 100-point record, with the analysis settings used
/// to decompose it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example1Preset {
    pub len: usize,
    pub grid_size: usize,
    pub components: Vec<JumpSinusoidSpec>,
    /// Frequency index sets that isolate each component.
    pub bands: Vec<Vec<usize>>,
    pub solver: SolverConfig,
}

/// A buried narrow-band component with a phase jump, interferers and noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example3Preset {
    pub sample_rate: f64,
    pub len: usize,
    pub grid_size: usize,
    pub target: JumpSinusoidSpec,
    pub interferers: Vec<JumpSinusoidSpec>,
    pub noise_sigma: f64,
    pub default_seed: u64,
    /// Lower index of the pair straddling the target frequency.
    pub pair_index: usize,
    /// Pass band (normalized) of the linear baseline.
    pub baseline_band: (f64, f64),
    pub solver: SolverConfig,
}

pub const EXAMPLE1_JSON: &str = include_str!("../presets/example1.json");
pub const EXAMPLE3_JSON: &str = include_str!("../presets/example3.json");

pub fn example1_preset() -> Example1Preset {
    serde_json::from_str(EXAMPLE1_JSON).expect("committed example1 preset parses")
}

pub fn example3_preset() -> Example3Preset {
    serde_json::from_str(EXAMPLE3_JSON).expect("committed example3 preset parses")
}

pub fn gen_example1() -> Result<JumpSum> {
    let p = example1_preset();
    gen_jump_sum(&p.components, p.len, 1.0)
}

/// Output of [`gen_example3`].
#[derive(Debug, Clone)]
pub struct Example3 {
    pub y: Signal,
    pub truth: Signal,
    /// Deterministic part of `y - truth`.
    pub interference: Vec<f64>,
    pub noise: Vec<f64>,
}

pub fn gen_example3(seed: u64) -> Result<Example3> {
    let p = example3_preset();
    let truth = p.target.render(p.len);
    let interference: Vec<f64> = (0..p.len)
        .map(|n| p.interferers.iter().map(|s| s.sample(n)).sum())
        .collect();
    let noise = white_noise(p.len, p.noise_sigma, seed);
    let y = (0..p.len)
        .map(|n| truth[n] + interference[n] + noise[n])
        .collect();
    Ok(Example3 {
        y: Signal::with_rate(y, p.sample_rate)?,
        truth: Signal::with_rate(truth, p.sample_rate)?,
        interference,
        noise,
    })
}

/// Power ratio (dB) of the target to everything else in `y`.
pub fn snr_db(truth: &[f64], rest: &[f64]) -> f64 {
    let p = |v: &[f64]| v.iter().map(|e| e * e).sum::<f64>();
    10.0 * (p(truth) / p(rest)).log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_preset_shape() {
        let p = example1_preset();
        let freqs: Vec<f64> = p.components.iter().map(|c| c.freq).collect();
        assert_eq!(freqs, vec![0.05, 0.1025, 0.1625]);
        let jumps: Vec<usize> = p.components.iter().map(|c| c.jump_index).collect();
        assert_eq!(jumps, vec![50, 38, 65]);
        let x1 = &p.components[0];
        assert!(x1.amp_before != x1.amp_after && x1.phase_before != x1.phase_after);
        assert_eq!((p.len, p.grid_size), (100, 100));
        p.solver.validate().unwrap();
    }

    #[test]
    fn steady_spec_is_pure_sinusoid() {
        let s = JumpSinusoidSpec::steady(0.1, 2.0, 0.3);
        for n in 0..20 {
            let e = 2.0 * (2.0 * PI * 0.1 * n as f64 + 0.3).cos();
            assert!((s.sample(n) - e).abs() < 1e-15);
        }
    }

    #[test]
    fn opposite_components_cancel() {
        let s = JumpSinusoidSpec::steady(0.07, 1.0, 0.2);
        let neg = JumpSinusoidSpec {
            amp_before: -1.0,
            amp_after: -1.0,
            ..s
        };
        let sum = gen_jump_sum(&[s, neg], 30, 1.0).unwrap();
        assert!(sum.signal.samples().iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn invalid_specs_rejected() {
        let s = JumpSinusoidSpec::steady(0.6, 1.0, 0.0);
        assert!(gen_jump_sum(&[s], 10, 1.0).is_err());
        let s = JumpSinusoidSpec {
            jump_index: 10,
            ..JumpSinusoidSpec::steady(0.1, 1.0, 0.0)
        };
        assert!(gen_jump_sum(&[s], 10, 1.0).is_err());
    }

    #[test]
    fn example3_is_deterministic() {
        let a = gen_example3(11).unwrap();
        let b = gen_example3(11).unwrap();
        assert_eq!(a.y.samples(), b.y.samples());
        let c = gen_example3(12).unwrap();
        assert_ne!(a.y.samples(), c.y.samples());
    }

    #[test]
    fn example3_layout() {
        let p = example3_preset();
        assert_eq!((p.sample_rate, p.len, p.grid_size), (100.0, 100, 50));
        assert!((p.target.freq - 0.095).abs() < 1e-15);
        assert_eq!(p.target.jump_index, 40);
        let step = (p.target.phase_after - p.target.phase_before).abs();
        assert!((step - PI).abs() < 1e-12);
        let e = gen_example3(p.default_seed).unwrap();
        let rest: Vec<f64> = e.interference.iter().zip(&e.noise).map(|(a, b)| a + b).collect();
        let snr = snr_db(e.truth.samples(), &rest);
        assert!((-7.0..=-3.0).contains(&snr), "snr {snr}");
    }

    #[test]
    fn truth_phase_has_impulsive_frequency_at_jump() {
        // Finite-difference of the unwrapped-free analytic phase: the jump
        // shows up as the only large increment.
        let p = example3_preset();
        let r = &p.target;
        let w = 2.0 * PI * r.freq;
        let phase = |n: usize| {
            let ph = if n < r.jump_index { r.phase_before } else { r.phase_after };
            w * n as f64 + ph
        };
        let incr: Vec<f64> = (1..p.len).map(|n| phase(n) - phase(n - 1) - w).collect();
        let big: Vec<usize> = incr
            .iter()
            .enumerate()
            .filter(|(_, d)| d.abs() > 1.0)
            .map(|(i, _)| i + 1)
            .collect();
        assert_eq!(big, vec![40]);
    }
}
