//! Cost functions for the two gait problems and a seeded, box-constrained
//! Nelder–Mead search.

mod cost;
mod nelder_mead;

pub use cost::{
    gait_bounds, gait_cost, gait_cost_of_trace, perch_cost, perch_cost_of_trace, GaitCostConfig, PerchCostConfig,
    BLOWUP_PENALTY,
};
pub use nelder_mead::{optimize, OptimResult, OptimizerSettings};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box `lo ≤ x ≤ hi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Bounds {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let b = Self { lo, hi };
        b.validate()?;
        Ok(b)
    }

    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn validate(&self) -> Result<()> {
        if self.lo.len() != self.hi.len() || self.lo.is_empty() {
            return Err(Error::InvalidConfig("bounds must be non-empty and of equal length".into()));
        }
        for (i, (l, h)) in self.lo.iter().zip(&self.hi).enumerate() {
            if !l.is_finite() || !h.is_finite() || l > h {
                return Err(Error::InvalidConfig(format!("bound {i} = [{l}, {h}] is not a finite ordered interval")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn width(&self, i: usize) -> f64 {
        self.hi[i] - self.lo[i]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(i, v)| *v >= self.lo[i] && *v <= self.hi[i])
    }

    /// Errors with the first offending component.
    pub fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::InvalidConfig(format!("expected {} parameters, got {}", self.dim(), x.len())));
        }
        for (i, v) in x.iter().enumerate() {
            if !(*v >= self.lo[i] && *v <= self.hi[i]) {
                return Err(Error::OutOfBounds { index: i, value: *v, lo: self.lo[i], hi: self.hi[i] });
            }
        }
        Ok(())
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lo[i], self.hi[i]);
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.dim()).map(|i| self.lo[i] + rng.random::<f64>() * self.width(i)).collect()
    }
}

#[cfg(test)]
mod tests;
