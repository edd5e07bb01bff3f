//! Per-direction expansion that accumulates sufficiently non-dominated points.
//!
//! Starting from an archive entry, each direction is probed with a growing
//! step `β → β/δ` for as long as the trial point passes the sufficiency test
//! against the evolving acceptance set. The failing trial that ends a
//! direction is discarded; the walker then moves to the last accepted point
//! before taking on the next direction.

use crate::directions::DirectionSet;
use crate::error::{Error, Result};
use crate::oracle::{EvalBudget, Objective};
use crate::types::{
    strictly_exceeds_shifted, DecisionPoint, ListEntry, ObjectiveVector, StepsizeVector,
};

/// Expansion steps beyond `ν/δ^OVERFLOW_POWER` abort the run; a step that
/// keeps growing that long means the objectives improve without bound along
/// the direction.
const OVERFLOW_POWER: i32 = 60;

/// One point accepted during an exploration.
#[derive(Debug, Clone)]
pub struct AcceptedPoint {
    pub point: DecisionPoint,
    pub objectives: ObjectiveVector,
    /// Index into the direction set that produced the point.
    pub direction: usize,
    /// Step length at acceptance time; the sufficiency margin was `γ·step²`.
    pub step: f64,
}

/// Outcome of one exploration around an entry.
#[derive(Debug, Clone)]
pub struct ExplorationResult {
    /// Newly produced points in acceptance order (the returned set minus the
    /// base set). The acceptance set at the time the `i`-th point was tested
    /// is the base set plus `accepted[..i]`.
    pub accepted: Vec<AcceptedPoint>,
    /// Final per-direction steps `(α¹, …, αʳ)`; direction `i` keeps its
    /// initialization `ν^i = max{α̃^i, ν̄}` when it accepted nothing.
    pub final_alphas: StepsizeVector,
    /// True exactly when `accepted` is non-empty.
    pub success: bool,
    /// Oracle calls issued, including the failing trial that ends each
    /// direction.
    pub evals_used: usize,
    /// True when the evaluation budget ran out mid-exploration.
    pub truncated: bool,
}

/// Explores all directions around `start`, testing trials against
/// `base_objectives` plus everything accepted so far.
///
/// `nu_bar` is the stepsize floor: direction `i` starts from
/// `max{α̃^i, nu_bar}`. Consecutive accepted steps along one direction grow
/// exactly by `1/delta`.
pub fn approximate_optimization(
    start: &ListEntry,
    base_objectives: &[ObjectiveVector],
    nu_bar: f64,
    directions: &DirectionSet,
    gamma: f64,
    delta: f64,
    oracle: &mut dyn Objective,
    budget: &mut EvalBudget,
) -> Result<ExplorationResult> {
    let r = directions.len();
    assert_eq!(
        start.steps.len(),
        r,
        "entry has {} stepsizes for {} directions",
        start.steps.len(),
        r
    );
    assert_eq!(start.point.dim(), directions.dim(), "dimension mismatch");
    assert!(nu_bar > 0.0, "stepsize floor must be positive");

    let mut walker: Vec<f64> = start.point.coords().to_vec();
    // The acceptance set is the base archive plus everything accepted so far;
    // it is never materialized to keep explorations allocation-light.
    let mut alphas: Vec<f64> = start
        .steps
        .alphas()
        .iter()
        .map(|a| a.max(nu_bar))
        .collect();
    let mut accepted: Vec<AcceptedPoint> = Vec::new();
    let mut evals_used = 0usize;
    let mut truncated = false;

    'directions: for i in 0..r {
        let dir = directions.dir(i);
        let nu = alphas[i];
        let cap = nu / delta.powi(OVERFLOW_POWER);
        let mut beta = nu;
        let mut moved = false;
        loop {
            if !budget.try_spend() {
                truncated = true;
                break 'directions;
            }
            let coords: Vec<f64> = walker
                .iter()
                .zip(dir)
                .map(|(y, d)| y + beta * d)
                .collect();
            let trial = DecisionPoint::new(coords)
                .map_err(|_| Error::StepOverflow { direction: i, beta })?;
            let objectives = oracle.eval(&trial)?;
            evals_used += 1;
            let pass = {
                let margin = gamma * beta * beta;
                base_objectives
                    .iter()
                    .chain(accepted.iter().map(|a| &a.objectives))
                    .all(|member| !strictly_exceeds_shifted(&objectives, member, margin))
            };
            if !pass {
                break;
            }
            let alpha = beta;
            accepted.push(AcceptedPoint {
                point: trial,
                objectives,
                direction: i,
                step: alpha,
            });
            alphas[i] = alpha;
            moved = true;
            beta = alpha / delta;
            if beta > cap {
                return Err(Error::StepOverflow { direction: i, beta });
            }
        }
        if moved {
            // y^{i+1} = y^i + α^i d^i, bitwise the last accepted point.
            walker = accepted
                .last()
                .expect("accepted point after a move")
                .point
                .coords()
                .to_vec();
        }
    }

    let success = !accepted.is_empty();
    Ok(ExplorationResult {
        accepted,
        final_alphas: StepsizeVector::new(alphas)?,
        success,
        evals_used,
        truncated,
    })
}
