use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances shared by every approximate assertion in the crate.
///
/// `abs_tol` governs direct algebraic identities, `composed_tol` results that pass
/// through square roots or inverses, and `eig_clip` the magnitude of negative
/// eigenvalues forgiven as rounding noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub composed_tol: f64,
    pub eig_clip: f64,
    pub sample_count: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            composed_tol: 1e-8,
            eig_clip: 1e-12,
            sample_count: 64,
        }
    }
}

impl ToleranceConfig {
    pub fn new(
        abs_tol: f64,
        composed_tol: f64,
        eig_clip: f64,
        sample_count: usize,
    ) -> Result<Self> {
        let cfg = Self {
            abs_tol,
            composed_tol,
            eig_clip,
            sample_count,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Default configuration with `abs_tol` replaced, widening the other two
    /// thresholds only as far as needed to keep `eig_clip <= abs_tol <= composed_tol`.
    pub fn with_abs_tol(abs_tol: f64) -> Result<Self> {
        let d = Self::default();
        Self::new(
            abs_tol,
            d.composed_tol.max(abs_tol),
            d.eig_clip.min(abs_tol),
            d.sample_count,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let all_positive = [self.abs_tol, self.composed_tol, self.eig_clip]
            .iter()
            .all(|t| t.is_finite() && *t > 0.0);
        if !all_positive || self.sample_count == 0 {
            return Err(Error::InvalidTolerance(format!(
                "all tolerances and sample_count must be strictly positive: {self:?}"
            )));
        }
        if !(self.eig_clip <= self.abs_tol && self.abs_tol <= self.composed_tol) {
            return Err(Error::InvalidTolerance(format!(
                "expected eig_clip <= abs_tol <= composed_tol, got {} / {} / {}",
                self.eig_clip, self.abs_tol, self.composed_tol
            )));
        }
        Ok(())
    }

    /// Threshold used for Loewner comparisons between square roots, which keep
    /// only about half the digits of their arguments near singularity.
    pub fn sqrt_tol(&self) -> f64 {
        self.abs_tol.sqrt()
    }
}
