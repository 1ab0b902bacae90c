use serde::{Deserialize, Serialize};

use crate::error::{Result, SfaError};

/// How the split variables `(u, v)` are seeded before the first ADMM step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    /// Constant columns from the zero-padded DFT when the grid lines up with
    /// DFT bins, otherwise [`InitStrategy::Projection`].
    #[default]
    Auto,
    /// `u(n,k) = (2/K) x(n) c(n,k)`, `v(n,k) = (2/K) x(n) s(n,k)`.
    Projection,
}

/// ADMM/MM parameters. `mu` defaults to `lam` when unset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Weight of the spectral sparsity term.
    pub lam: f64,
    /// Data-fidelity weight (noisy problem only).
    pub lam1: f64,
    /// Augmented-Lagrangian penalty; `None` means `lam`.
    pub mu: Option<f64>,
    /// MM iterations per ADMM iteration.
    pub mm_iters: usize,
    pub max_admm_iters: usize,
    /// Converged once `||u-a||_F + ||v-b||_F <= tol_primal * sqrt(N K)` ...
    pub tol_primal: f64,
    /// ... and the relative change of `(a, b)` over one iteration is below this.
    pub tol_change: f64,
    pub init: InitStrategy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lam: 1.0,
            lam1: 1.0,
            mu: None,
            mm_iters: 3,
            max_admm_iters: 2000,
            tol_primal: 1e-6,
            tol_change: 1e-8,
            init: InitStrategy::Auto,
        }
    }
}

impl SolverConfig {
    pub fn with_lam(lam: f64) -> Self {
        Self {
            lam,
            ..Self::default()
        }
    }

    pub fn effective_mu(&self) -> f64 {
        self.mu.unwrap_or(self.lam)
    }

    pub fn validate(&self) -> Result<()> {
        positive("lam", self.lam)?;
        positive("lam1", self.lam1)?;
        if let Some(mu) = self.mu {
            positive("mu", mu)?;
        }
        positive("tol_primal", self.tol_primal)?;
        positive("tol_change", self.tol_change)?;
        if self.mm_iters == 0 {
            return Err(SfaError::Config {
                field: "mm_iters",
                reason: "must be at least 1".into(),
            });
        }
        if self.max_admm_iters == 0 {
            return Err(SfaError::Config {
                field: "max_admm_iters",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(SfaError::Config {
            field,
            reason: format!("must be positive and finite, got {v}"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = SolverConfig::default();
        c.validate().unwrap();
        assert_eq!(c.effective_mu(), c.lam);
        assert_eq!(c.mm_iters, 3);
    }

    #[test]
    fn rejects_bad_fields() {
        let bad = |f: fn(&mut SolverConfig)| {
            let mut c = SolverConfig::default();
            f(&mut c);
            match c.validate() {
                Err(SfaError::Config { field, .. }) => field,
                other => panic!("expected config error, got {other:?}"),
            }
        };
        assert_eq!(bad(|c| c.mu = Some(0.0)), "mu");
        assert_eq!(bad(|c| c.lam = -1.0), "lam");
        assert_eq!(bad(|c| c.lam1 = f64::NAN), "lam1");
        assert_eq!(bad(|c| c.mm_iters = 0), "mm_iters");
    }

    #[test]
    fn json_partial_and_unknown() {
        let c = SolverConfig::from_json(r#"{"lam": 0.5, "mu": 2.0}"#).unwrap();
        assert_eq!(c.lam, 0.5);
        assert_eq!(c.effective_mu(), 2.0);
        assert_eq!(c.max_admm_iters, 2000);
        assert!(SolverConfig::from_json(r#"{"lamda": 1}"#).is_err());
        assert!(matches!(
            SolverConfig::from_json(r#"{"mu": -1}"#),
            Err(SfaError::Config { field: "mu", .. })
        ));
    }
}
