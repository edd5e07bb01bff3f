//! The black-box objective interface and evaluation accounting.

use crate::error::Result;
use crate::types::{DecisionPoint, ObjectiveVector};

/// A vector-valued black box `F: ℝⁿ → ℝ^q`. One call returns all `q` values.
pub trait Objective {
    /// Decision-space dimension.
    fn n(&self) -> usize;
    /// Number of objectives.
    fn q(&self) -> usize;
    /// Evaluates the objectives at `x`. Implementations must return an error
    /// rather than a vector containing NaN or infinities.
    fn eval(&mut self, x: &DecisionPoint) -> Result<ObjectiveVector>;
}

/// Wraps an oracle and counts every call; used to keep algorithm-driven and
/// diagnostic evaluations in separate ledgers.
pub struct CountingOracle<'a> {
    inner: &'a mut dyn Objective,
    count: u64,
}

impl<'a> CountingOracle<'a> {
    pub fn new(inner: &'a mut dyn Objective) -> Self {
        Self { inner, count: 0 }
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

impl Objective for CountingOracle<'_> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn q(&self) -> usize {
        self.inner.q()
    }

    fn eval(&mut self, x: &DecisionPoint) -> Result<ObjectiveVector> {
        self.count += 1;
        self.inner.eval(x)
    }
}

/// Remaining evaluation allowance of a run. `None` means unlimited.
#[derive(Debug, Clone)]
pub struct EvalBudget {
    limit: Option<u64>,
    used: u64,
}

impl EvalBudget {
    pub fn new(limit: Option<u64>) -> Self {
        Self { limit, used: 0 }
    }

    pub fn unlimited() -> Self {
        Self::new(None)
    }

    /// Reserves one evaluation; false when the budget is exhausted.
    pub fn try_spend(&mut self) -> bool {
        match self.limit {
            Some(limit) if self.used >= limit => false,
            _ => {
                self.used += 1;
                true
            }
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn exhausted(&self) -> bool {
        matches!(self.limit, Some(limit) if self.used >= limit)
    }
}
