//! Bounded minimization problems.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Per-dimension box constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::Config("bounds must have at least one dimension".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::Dimension {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Config(format!(
                    "bound {i} is invalid: lower {lo} must be finite and below upper {hi}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval repeated `dim` times.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn clamp(&self, i: usize, v: f64) -> f64 {
        v.clamp(self.lower[i], self.upper[i])
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }
}

/// When a run counts as successful.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SuccessTarget {
    /// `|f - value| <= tolerance`
    Near { value: f64, tolerance: f64 },
    /// `f <= threshold`
    AtMost(f64),
}

impl SuccessTarget {
    pub fn is_met(&self, f: f64) -> bool {
        match *self {
            SuccessTarget::Near { value, tolerance } => (f - value).abs() <= tolerance,
            SuccessTarget::AtMost(threshold) => f <= threshold,
        }
    }
}

pub type ObjectiveFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// An objective together with its search box and success rule.
#[derive(Clone)]
pub struct Problem {
    name: String,
    bounds: Bounds,
    objective: Arc<ObjectiveFn>,
    known_optimum: Option<f64>,
    target: SuccessTarget,
}

impl Problem {
    pub fn new<F>(name: impl Into<String>, bounds: Bounds, target: SuccessTarget, objective: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            bounds,
            objective: Arc::new(objective),
            known_optimum: None,
            target,
        }
    }

    pub fn with_known_optimum(mut self, value: f64) -> Self {
        self.known_optimum = Some(value);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn known_optimum(&self) -> Option<f64> {
        self.known_optimum
    }

    pub fn target(&self) -> SuccessTarget {
        self.target
    }

    /// Raw objective value, without finiteness checks.
    pub fn objective(&self, x: &[f64]) -> f64 {
        (self.objective)(x)
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dim", &self.bounds.dim())
            .field("known_optimum", &self.known_optimum)
            .field("target", &self.target)
            .finish()
    }
}
