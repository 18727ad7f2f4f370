use crate::error::{Error, Result};

use super::ladder::LadderRule;

/// Quadrature and ladder settings.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadConfig {
    /// First excision radius.
    pub eps0: f64,
    /// Number of rungs.
    pub ladder_len: usize,
    /// `ε_{k+1} = ε_k / ratio`.
    pub ratio: f64,
    /// Trailing differences inspected by the convergence test.
    pub window: usize,
    pub shrink: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Subinterval budget of the outermost adaptive rule.
    pub outer_intervals: usize,
    /// Subinterval budget of the inner adaptive rules.
    pub inner_intervals: usize,
    /// Dimensions above this use Monte-Carlo for the outer variables.
    pub mc_threshold: usize,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            eps0: 1.0 / 16.0,
            ladder_len: 12,
            ratio: 2.0,
            window: 3,
            shrink: 1.5,
            abs_tol: 1e-11,
            rel_tol: 1e-9,
            outer_intervals: 400,
            inner_intervals: 60,
            mc_threshold: 4,
            mc_samples: 20_000,
            seed: 0,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Precondition(format!("quadrature config: {m}")));
        if !(self.eps0 > 0.0) {
            return bad("eps0 must be positive");
        }
        if self.ladder_len < 3 {
            return bad("ladder needs at least 3 rungs");
        }
        if !(self.ratio > 1.0) {
            return bad("ratio must exceed 1");
        }
        if !(self.shrink > 1.0) {
            return bad("shrink factor must exceed 1");
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.window == 0 || self.outer_intervals == 0 || self.inner_intervals == 0 || self.mc_samples == 0 {
            return bad("window and budgets must be positive");
        }
        Ok(())
    }

    /// `ε_k = eps0 · ratio^{-k}`, `k = 0..ladder_len`.
    pub fn rungs(&self) -> Vec<f64> {
        (0..self.ladder_len)
            .map(|k| self.eps0 / self.ratio.powi(k as i32))
            .collect()
    }

    pub fn ladder_rule(&self) -> LadderRule {
        LadderRule {
            window: self.window,
            shrink: self.shrink,
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
        }
    }
}
