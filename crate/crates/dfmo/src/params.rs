//! Solver parameters and stopping rules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// When a run gives up. At least one criterion must be set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StoppingRule {
    /// Maximum number of outer iterations.
    pub max_iters: Option<u64>,
    /// Overall budget of algorithm-driven objective evaluations. Exhausting
    /// it mid-iteration truncates the run.
    pub max_evals: Option<u64>,
    /// Stop when the largest stepsize in the list falls to this value.
    pub delta_tol: Option<f64>,
}

impl StoppingRule {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters.is_none() && self.max_evals.is_none() && self.delta_tol.is_none() {
            return Err(Error::Config(
                "set at least one stopping criterion (max_iters, max_evals or delta_tol)".into(),
            ));
        }
        if let Some(tol) = self.delta_tol {
            if !tol.is_finite() || tol <= 0.0 {
                return Err(Error::Config(format!(
                    "delta_tol must be strictly positive, got {tol}"
                )));
            }
        }
        Ok(())
    }
}

/// Parameters shared by all solver variants.
///
/// `theta` shrinks stepsizes after a failed exploration, `gamma` scales the
/// sufficiency margin `γα²`, `delta` drives the expansion `α → α/δ`, `c`
/// scales the floor `ν̄` handed to each exploration, `eta` weighs the step
/// term of the cost function `Φ` and must satisfy `0 < η < γ^q`, and `s` is
/// the offset added when deriving the hypervolume reference point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoParams {
    pub theta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub c: f64,
    pub eta: f64,
    pub s: f64,
    /// Number of search directions; must match the direction set.
    pub r: usize,
    pub seed: u64,
    pub stop: StoppingRule,
}

impl AlgoParams {
    /// Checks every range constraint, including the `q`-dependent `η < γ^q`
    /// bound that keeps the decrease constant of `Φ` positive.
    pub fn validate(&self, q: usize) -> Result<()> {
        let open_unit = [
            ("theta", self.theta),
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("c", self.c),
        ];
        for (name, v) in open_unit {
            if !v.is_finite() || v <= 0.0 || v >= 1.0 {
                return Err(Error::Config(format!(
                    "{name} must lie in the open interval (0, 1), got {v}"
                )));
            }
        }
        let gamma_q = self.gamma.powi(q as i32);
        if !self.eta.is_finite() || self.eta <= 0.0 || self.eta >= gamma_q {
            return Err(Error::Config(format!(
                "eta must satisfy 0 < eta < gamma^q = {gamma_q} (gamma = {}, q = {q}), got {}",
                self.gamma, self.eta
            )));
        }
        if !self.s.is_finite() || self.s <= 0.0 {
            return Err(Error::Config(format!(
                "reference-point offset s must be strictly positive, got {}",
                self.s
            )));
        }
        if self.r < 2 {
            return Err(Error::Config(format!(
                "at least two search directions are required, got r = {}",
                self.r
            )));
        }
        self.stop.validate()
    }

    /// The decrease constant
    /// `c̃ = min{η(1−θ^2q)/θ^2q, γ^q c^2q, γ^q − η}` governing the
    /// per-iteration sufficient decrease of `Φ`.
    pub fn tilde_c(&self, q: usize) -> f64 {
        let two_q = 2 * q as i32;
        let theta_2q = self.theta.powi(two_q);
        let gamma_q = self.gamma.powi(q as i32);
        let a = self.eta * (1.0 - theta_2q) / theta_2q;
        let b = gamma_q * self.c.powi(two_q);
        let d = gamma_q - self.eta;
        a.min(b).min(d)
    }
}

impl Default for AlgoParams {
    fn default() -> Self {
        Self {
            theta: 0.5,
            gamma: 0.5,
            delta: 0.5,
            c: 0.9,
            eta: 0.1,
            s: 1.0,
            r: 2,
            seed: 0,
            stop: StoppingRule {
                max_iters: Some(1000),
                max_evals: None,
                delta_tol: None,
            },
        }
    }
}
