use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;

/// Where a [`TwoPlaceFunction`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Catalog,
    Expression,
    Tabulated,
}

pub type EvalFn = dyn Fn(f64, f64) -> Result<f64, String> + Send + Sync;

/// Relative slack (in units of the codomain width) tolerated on closure.
/// Values inside the slack are clamped onto the codomain.
const CLOSURE_SLACK: f64 = 1e-10;

/// A pure map `F: domain² → codomain`.
///
/// `domain` is where verifiers sample arguments. `codomain` defaults to the
/// domain; it is larger only for operations that are not closed on their
/// sampling square (translative forms), and nested evaluations such as
/// `F(F(x,y), z)` are accepted anywhere inside it.
#[derive(Clone)]
pub struct TwoPlaceFunction {
    domain: Interval,
    codomain: Interval,
    label: String,
    provenance: Provenance,
    eval: Arc<EvalFn>,
}

impl TwoPlaceFunction {
    pub fn new<F>(domain: Interval, label: impl Into<String>, provenance: Provenance, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self::fallible(domain, label, provenance, move |x, y| Ok(f(x, y)))
    }

    /// Like [`TwoPlaceFunction::new`] for maps that can fail at runtime
    /// (division by zero in a user expression, say).
    pub fn fallible<F>(domain: Interval, label: impl Into<String>, provenance: Provenance, f: F) -> Self
    where
        F: Fn(f64, f64) -> Result<f64, String> + Send + Sync + 'static,
    {
        TwoPlaceFunction { domain, codomain: domain, label: label.into(), provenance, eval: Arc::new(f) }
    }

    pub fn with_codomain(mut self, codomain: Interval) -> Result<Self> {
        if !codomain.contains_interval(&self.domain, 0.0) {
            return Err(Error::InvalidArgument(format!(
                "codomain {codomain} must contain the domain {}",
                self.domain
            )));
        }
        self.codomain = codomain;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn codomain(&self) -> Interval {
        self.codomain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Evaluates `F(x, y)`, enforcing that both arguments and the value lie
    /// in the codomain.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let slack = CLOSURE_SLACK * self.codomain.width();
        if !self.codomain.contains_within(x, slack) || !self.codomain.contains_within(y, slack) {
            return Err(Error::OutsideDomain { label: self.label.clone(), x, y, domain: self.codomain });
        }
        let value = (self.eval)(x, y).map_err(|reason| Error::Evaluation {
            label: self.label.clone(),
            x,
            y,
            reason,
        })?;
        if !value.is_finite() {
            return Err(Error::Evaluation {
                label: self.label.clone(),
                x,
                y,
                reason: format!("non-finite value {value}"),
            });
        }
        if !self.codomain.contains_within(value, slack) {
            return Err(Error::Closure { label: self.label.clone(), x, y, value, codomain: self.codomain });
        }
        Ok(self.codomain.clamp(value))
    }

    /// Checks closure on a `grid_n × grid_n` grid of the domain.
    pub fn check_closure(&self, grid_n: usize) -> Result<()> {
        let grid = self.domain.grid(grid_n)?;
        for &x in &grid {
            for &y in &grid {
                self.eval(x, y)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TwoPlaceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoPlaceFunction")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("codomain", &self.codomain)
            .field("provenance", &self.provenance)
            .finish_non_exhaustive()
    }
}
