//! Sparse frequency analysis.
//!
//! Decomposes a real signal into sinusoids on a uniform frequency grid whose
//! cosine/sine amplitudes are piecewise constant in time. The decomposition
//! minimizes the total variation of every amplitude column plus an l1 penalty
//! on the per-frequency amplitude energy, either subject to exact
//! reconstruction ([`solve_p0`]) or with a quadratic data term ([`solve_p1`]).
//!
//! Narrow-band components, merged center-frequency amplitudes, instantaneous
//! phase and phase-locking values are derived in [`band`].

pub mod band;
pub mod baseline;
pub mod dft;
pub mod error;
pub mod io;
pub mod metrics;
pub mod model;
pub mod solver;
pub mod synth;
pub mod tvd;

pub use error::{Result, SfaError};
pub use model::{
    reconstruct, spectrum, AmplitudeMatrix, Decomposition, FrequencyGrid, ProblemKind, Signal,
    SolveInfo, Spectrum,
};
pub use solver::{solve, solve_p0, solve_p1, solve_with, SolveOptions, SolveReport, SolverConfig};
