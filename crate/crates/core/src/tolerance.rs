use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numeric tolerances and sampling sizes shared by every verifier.
///
/// Two runs with equal configurations (and equal functions) produce
/// bit-identical reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Absolute tolerance for value equality.
    pub eq_tol: f64,
    /// Extra increase, on top of `eq_tol`, required to call a value strictly greater.
    pub strict_margin: f64,
    /// Points per axis for grid-based checks.
    pub grid_n: usize,
    /// Random tuples drawn by the randomized checks.
    pub samples: usize,
    pub seed: u64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig { eq_tol: 1e-9, strict_margin: 0.0, grid_n: 101, samples: 10_000, seed: 0 }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eq_tol > 0.0 && self.eq_tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("eq_tol must be positive, got {}", self.eq_tol)));
        }
        if !(self.strict_margin >= 0.0 && self.strict_margin.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "strict_margin must be non-negative, got {}",
                self.strict_margin
            )));
        }
        if self.grid_n < 2 {
            return Err(Error::InvalidConfig(format!("grid_n must be at least 2, got {}", self.grid_n)));
        }
        if self.samples == 0 {
            return Err(Error::InvalidConfig("samples must be positive".into()));
        }
        Ok(())
    }

    /// An increase counts as strict only when it exceeds this value.
    pub fn strict_threshold(&self) -> f64 {
        self.eq_tol + self.strict_margin
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_grid(mut self, grid_n: usize) -> Self {
        self.grid_n = grid_n;
        self
    }

    pub fn with_eq_tol(mut self, eq_tol: f64) -> Self {
        self.eq_tol = eq_tol;
        self
    }
}
