//! The outer solvers: full-list exploration and single-point exploration with
//! pluggable selection, plus per-iteration instrumentation.
//!
//! Both drivers share the same skeleton. Iteration `k` turns list `L_k` into
//! `L_{k+1}`: explorations run around chosen entries, failures shrink that
//! entry's stepsizes by `θ`, successes insert the newly produced points, and
//! the list is re-filtered to its non-dominated subset. The trace records one
//! row per reached state; row `k+1` carries the success flag and selection of
//! the iteration that produced it.

use std::sync::Arc;

use serde::Serialize;

use crate::directions::DirectionSet;
use crate::error::{Error, Result};
use crate::hypervolume::{hypervolume_clipped, make_reference, ReferencePoint};
use crate::linesearch::{approximate_optimization, AcceptedPoint};
use crate::oracle::{EvalBudget, Objective};
use crate::params::AlgoParams;
use crate::types::{
    filter_nondominated, filter_with_trusted_prefix, DecisionPoint, EntryId, ListEntry,
    ObjectiveVector, ParetoList, StepsizeVector,
};

/// One trace row: the state after `k` iterations.
///
/// `phi_delta = −hi + η·Δ̄^2q` and `phi_xi = −hi + η·ξ^2q`; the first is the
/// native cost of the full-list and max-selection variants, the second of the
/// min-selection variant. Both are always recorded.
#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub k: u64,
    pub list_size: usize,
    /// `Δ̄_k`: for the strong driver the running maximum over the pre-filter
    /// working list, for the light driver the maximum over `L_k`.
    pub delta_bar: f64,
    /// `ξ_k`: minimum over `L_k` of each entry's maximum stepsize.
    pub xi: f64,
    /// Hypervolume of the list objectives under the run's reference point.
    pub hi: f64,
    pub phi_delta: f64,
    pub phi_xi: f64,
    /// Algorithm-driven oracle calls issued so far (diagnostics excluded).
    pub nf_cum: u64,
    /// Whether the iteration leading to this state changed the point set.
    pub success: bool,
    /// Entry explored by the iteration leading to this state (light only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selected_id: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_min: Option<f64>,
}

/// How the light driver picks the entry to explore.
#[derive(Clone)]
pub enum SelectionStrategy {
    /// The insertion-order-first entry attaining `ξ_k`.
    MinMaxStep,
    /// The insertion-order-first entry attaining `Δ̄_k`.
    MaxMaxStep,
    /// Entry `k mod |L_k|`.
    RoundRobin,
    /// Arbitrary deterministic rule; receives the list and the iteration
    /// index, returns an entry index.
    UserHook(Arc<dyn Fn(&ParetoList, u64) -> usize + Send + Sync>),
}

impl std::fmt::Debug for SelectionStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::MinMaxStep => write!(f, "MinMaxStep"),
            Self::MaxMaxStep => write!(f, "MaxMaxStep"),
            Self::RoundRobin => write!(f, "RoundRobin"),
            Self::UserHook(_) => write!(f, "UserHook"),
        }
    }
}

impl SelectionStrategy {
    /// Index of the selected entry; ties break to the earliest inserted.
    pub fn select(&self, list: &ParetoList, k: u64) -> usize {
        assert!(!list.is_empty(), "selection from an empty list");
        match self {
            Self::MinMaxStep => {
                let mut best = 0;
                for (i, e) in list.entries().iter().enumerate() {
                    if e.max_step() < list.entries()[best].max_step() {
                        best = i;
                    }
                }
                best
            }
            Self::MaxMaxStep => {
                let mut best = 0;
                for (i, e) in list.entries().iter().enumerate() {
                    if e.max_step() > list.entries()[best].max_step() {
                        best = i;
                    }
                }
                best
            }
            Self::RoundRobin => (k % list.len() as u64) as usize,
            Self::UserHook(hook) => {
                let idx = hook(list, k);
                assert!(idx < list.len(), "selection hook returned {idx} for a list of {}", list.len());
                idx
            }
        }
    }
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The list's largest stepsize fell to `delta_tol`.
    DeltaTol,
    /// The configured iteration count was reached.
    MaxIters,
    /// The evaluation budget ran out mid-iteration; the result holds the
    /// state reached so far.
    EvalBudget,
}

/// Parent link of an entry produced during the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LineageEdge {
    pub child: u64,
    pub parent: u64,
}

/// Instrumentation switches that do not affect solver decisions.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Explicit reference point; otherwise `ρ` is the componentwise maximum
    /// of the initial list's objectives plus `s`. Fixed for the whole run.
    pub rho_override: Option<ObjectiveVector>,
    /// Central-difference step for the criticality columns.
    pub fd_step: f64,
    /// Record `Γ` and `Γ̄` on every trace row.
    pub trace_criticality: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            rho_override: None,
            fd_step: 1e-5,
            trace_criticality: false,
        }
    }
}

/// Everything a finished run reports.
#[derive(Debug)]
pub struct SolveResult {
    pub final_list: ParetoList,
    pub trace: Vec<IterationRecord>,
    /// Child-to-parent edges for every entry generated after the initial
    /// list; walking parents always bottoms out in the initial list.
    pub lineage: Vec<LineageEdge>,
    pub stop: StopReason,
    /// Algorithm-driven oracle calls (initial list plus exploration trials).
    pub nf_algorithm: u64,
    /// Oracle calls spent on criticality diagnostics.
    pub nf_diagnostic: u64,
    /// How many times a list member exceeded the reference point in some
    /// coordinate and was clipped for hypervolume bookkeeping.
    pub clip_events: u64,
    /// The reference point the instrumentation used.
    pub rho: ReferencePoint,
}

impl SolveResult {
    pub fn truncated(&self) -> bool {
        self.stop == StopReason::EvalBudget
    }
}

/// Full-list driver: every iteration explores around each entry of the
/// snapshot of `L_k`, testing against the evolving working list.
pub fn dfmo_strong(
    oracle: &mut dyn Objective,
    starts: &[(DecisionPoint, StepsizeVector)],
    directions: &DirectionSet,
    params: &AlgoParams,
    options: &SolveOptions,
) -> Result<SolveResult> {
    solve(oracle, starts, directions, params, Mode::Strong, options)
}

/// Single-point driver: every iteration explores around one entry picked by
/// `strategy`, testing against `L_k`.
pub fn dfmo_light(
    oracle: &mut dyn Objective,
    starts: &[(DecisionPoint, StepsizeVector)],
    directions: &DirectionSet,
    params: &AlgoParams,
    strategy: &SelectionStrategy,
    options: &SolveOptions,
) -> Result<SolveResult> {
    solve(oracle, starts, directions, params, Mode::Light(strategy), options)
}

enum Mode<'a> {
    Strong,
    Light(&'a SelectionStrategy),
}

/// Counts diagnostic evaluations separately from the solver's budget.
struct DiagnosticOracle<'a> {
    inner: &'a mut dyn Objective,
    count: &'a mut u64,
}

impl Objective for DiagnosticOracle<'_> {
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn q(&self) -> usize {
        self.inner.q()
    }
    fn eval(&mut self, x: &DecisionPoint) -> Result<ObjectiveVector> {
        *self.count += 1;
        self.inner.eval(x)
    }
}

fn solve(
    oracle: &mut dyn Objective,
    starts: &[(DecisionPoint, StepsizeVector)],
    directions: &DirectionSet,
    params: &AlgoParams,
    mode: Mode<'_>,
    options: &SolveOptions,
) -> Result<SolveResult> {
    let n = oracle.n();
    let q = oracle.q();
    params.validate(q)?;
    if params.r != directions.len() {
        return Err(Error::Config(format!(
            "params declare r = {} but the direction set has {} directions",
            params.r,
            directions.len()
        )));
    }
    if directions.dim() != n {
        return Err(Error::Config(format!(
            "directions live in dimension {}, problem in {n}",
            directions.dim()
        )));
    }
    if starts.is_empty() {
        return Err(Error::Config("initial list must not be empty".into()));
    }
    for (point, steps) in starts {
        if point.dim() != n {
            return Err(Error::Config(format!(
                "initial point {:?} has dimension {}, expected {n}",
                point.coords(),
                point.dim()
            )));
        }
        if steps.len() != directions.len() {
            return Err(Error::Config(format!(
                "initial stepsizes have {} components for {} directions",
                steps.len(),
                directions.len()
            )));
        }
    }

    let mut budget = EvalBudget::new(params.stop.max_evals);
    let mut nf_diagnostic = 0u64;
    let mut next_id = 0u64;

    let mut initial = Vec::with_capacity(starts.len());
    for (point, steps) in starts {
        if !budget.try_spend() {
            return Err(Error::Config(
                "evaluation budget too small to evaluate the initial list".into(),
            ));
        }
        let objectives = oracle.eval(point)?;
        initial.push(ListEntry::new(
            point.clone(),
            objectives,
            steps.clone(),
            EntryId(next_id),
            None,
            0,
        ));
        next_id += 1;
    }
    let mut list = filter_nondominated(initial);

    let rho = match &options.rho_override {
        Some(vector) => {
            if vector.len() != q {
                return Err(Error::Config(format!(
                    "reference point has {} components, problem has {q} objectives",
                    vector.len()
                )));
            }
            ReferencePoint::from_vector(vector.clone())
        }
        None => {
            let observed_max = ObjectiveVector::new(
                (0..q)
                    .map(|i| {
                        list.entries()
                            .iter()
                            .map(|e| e.objectives.values()[i])
                            .fold(f64::NEG_INFINITY, f64::max)
                    })
                    .collect(),
            )?;
            make_reference(&observed_max, params.s)?
        }
    };

    let mut clip_events = 0u64;
    let mut lineage = Vec::new();
    let mut trace = Vec::new();
    let mut delta_bar = list.max_step();
    trace.push(make_record(
        0,
        &list,
        delta_bar,
        &rho,
        params,
        q,
        budget.used(),
        false,
        None,
        None,
        &mut clip_events,
        oracle,
        &mut nf_diagnostic,
        options,
    )?);

    let mut k = 0u64;
    let stop = loop {
        if let Some(tol) = params.stop.delta_tol {
            if delta_bar <= tol {
                break StopReason::DeltaTol;
            }
        }
        if let Some(max_iters) = params.stop.max_iters {
            if k >= max_iters {
                break StopReason::MaxIters;
            }
        }

        let mut boxes_fit = true;
        let mut truncated = false;
        let mut selected_id = None;
        let mut selected_delta = None;
        // Whether the point set changed; None means "compare id sets".
        let mut known_success: Option<bool> = None;

        let next_list = match &mode {
            Mode::Strong => {
                // The iteration walks a snapshot of L_k while the working
                // list evolves underneath it: explorations test against every
                // point produced so far this iteration. Entries are only
                // appended or updated in place, so snapshot index i stays at
                // working index i. `working_objs` mirrors the objectives to
                // spare per-entry clones of the whole archive.
                let snapshot = list.len();
                let mut working: Vec<ListEntry> = list.entries().to_vec();
                let mut working_objs: Vec<ObjectiveVector> = list.objectives();
                for idx in 0..snapshot {
                    let entry = working[idx].clone();
                    let exploration = approximate_optimization(
                        &entry,
                        &working_objs,
                        params.c * delta_bar,
                        directions,
                        params.gamma,
                        params.delta,
                        oracle,
                        &mut budget,
                    )?;
                    boxes_fit &= margin_boxes_fit(&exploration.accepted, &rho, params.gamma);
                    if exploration.success {
                        for acc in &exploration.accepted {
                            working.push(ListEntry::new(
                                acc.point.clone(),
                                acc.objectives.clone(),
                                exploration.final_alphas.clone(),
                                EntryId(next_id),
                                Some(entry.id),
                                k + 1,
                            ));
                            working_objs.push(acc.objectives.clone());
                            lineage.push(LineageEdge {
                                child: next_id,
                                parent: entry.id.0,
                            });
                            next_id += 1;
                        }
                    } else {
                        working[idx].steps = exploration.final_alphas.scaled(params.theta);
                    }
                    if exploration.truncated {
                        truncated = true;
                        break;
                    }
                }
                // Δ̄_{k+1} comes from the working list before filtering.
                delta_bar = working
                    .iter()
                    .map(ListEntry::max_step)
                    .fold(f64::NEG_INFINITY, f64::max);
                filter_with_trusted_prefix(working, snapshot)
            }
            Mode::Light(strategy) => {
                let idx = strategy.select(&list, k);
                let entry = list.entries()[idx].clone();
                selected_id = Some(entry.id.0);
                let delta_k = entry.max_step();
                selected_delta = Some(delta_k);
                let base = list.objectives();
                let exploration = approximate_optimization(
                    &entry,
                    &base,
                    params.c * delta_k,
                    directions,
                    params.gamma,
                    params.delta,
                    oracle,
                    &mut budget,
                )?;
                boxes_fit &= margin_boxes_fit(&exploration.accepted, &rho, params.gamma);
                truncated = exploration.truncated;
                let mut next = list.clone();
                if exploration.success {
                    let new_entries: Vec<ListEntry> = exploration
                        .accepted
                        .iter()
                        .map(|acc| {
                            let e = ListEntry::new(
                                acc.point.clone(),
                                acc.objectives.clone(),
                                exploration.final_alphas.clone(),
                                EntryId(next_id),
                                Some(entry.id),
                                k + 1,
                            );
                            lineage.push(LineageEdge {
                                child: next_id,
                                parent: entry.id.0,
                            });
                            next_id += 1;
                            e
                        })
                        .collect();
                    next.insert_filtered(new_entries);
                    // A point accepted last was tested against everything
                    // already present, so it always survives the filter.
                    known_success = Some(true);
                } else {
                    // Shrinking cannot change dominance, so no re-filter and
                    // no change to the point set.
                    next.replace_steps(entry.id, exploration.final_alphas.scaled(params.theta));
                    known_success = Some(false);
                }
                delta_bar = next.max_step();
                next
            }
        };

        let success = match known_success {
            Some(flag) => {
                debug_assert_eq!(flag, next_list.id_set() != list.id_set());
                flag
            }
            None => next_list.id_set() != list.id_set(),
        };
        k += 1;
        // An unchanged point set keeps its hypervolume bitwise.
        let cached_hi = if success {
            None
        } else {
            trace.last().map(|prev: &IterationRecord| prev.hi)
        };
        let record = make_record(
            k,
            &next_list,
            delta_bar,
            &rho,
            params,
            q,
            budget.used(),
            success,
            selected_id,
            cached_hi,
            &mut clip_events,
            oracle,
            &mut nf_diagnostic,
            options,
        )?;
        #[cfg(debug_assertions)]
        check_iteration_properties(
            trace.last().expect("previous record"),
            &record,
            params,
            q,
            &mode,
            clip_events,
            boxes_fit,
            selected_delta,
        );
        #[cfg(not(debug_assertions))]
        let _ = (boxes_fit, selected_delta);
        trace.push(record);
        list = next_list;
        if truncated {
            break StopReason::EvalBudget;
        }
    };

    Ok(SolveResult {
        final_list: list,
        trace,
        lineage,
        stop,
        nf_algorithm: budget.used(),
        nf_diagnostic,
        clip_events,
        rho,
    })
}

/// True when every accepted point's sufficiency box `[F, F + γ·step²·𝟏]`
/// lies inside the reference box, which is the premise under which each
/// acceptance is worth `(γ·step²)^q` of hypervolume.
fn margin_boxes_fit(accepted: &[AcceptedPoint], rho: &ReferencePoint, gamma: f64) -> bool {
    accepted.iter().all(|acc| {
        let margin = gamma * acc.step * acc.step;
        acc.objectives
            .values()
            .iter()
            .zip(rho.values())
            .all(|(f, r)| f + margin <= *r)
    })
}

#[allow(clippy::too_many_arguments)]
fn make_record(
    k: u64,
    list: &ParetoList,
    delta_bar: f64,
    rho: &ReferencePoint,
    params: &AlgoParams,
    q: usize,
    nf_cum: u64,
    success: bool,
    selected_id: Option<u64>,
    cached_hi: Option<f64>,
    clip_events: &mut u64,
    oracle: &mut dyn Objective,
    nf_diagnostic: &mut u64,
    options: &SolveOptions,
) -> Result<IterationRecord> {
    let hi = match cached_hi {
        Some(hi) => hi,
        None => {
            let (hi, clips) = hypervolume_clipped(&list.objectives(), rho)?;
            *clip_events += clips;
            hi
        }
    };
    let xi = list.min_step();
    let two_q = 2 * q as i32;
    let (gamma_max, gamma_min) = if options.trace_criticality {
        let mut diag = DiagnosticOracle {
            inner: oracle,
            count: nf_diagnostic,
        };
        let worst = crate::criticality::gamma_max(list, &mut diag, options.fd_step)?;
        let best = crate::criticality::gamma_min(list, &mut diag, options.fd_step)?;
        (Some(worst), Some(best))
    } else {
        (None, None)
    };
    Ok(IterationRecord {
        k,
        list_size: list.len(),
        delta_bar,
        xi,
        hi,
        phi_delta: -hi + params.eta * delta_bar.powi(two_q),
        phi_xi: -hi + params.eta * xi.powi(two_q),
        nf_cum,
        success,
        selected_id,
        gamma_max,
        gamma_min,
    })
}

/// Per-iteration sufficient decrease and increase properties, checked in
/// debug builds whenever the reference point was valid for every evaluated
/// point (no clipping, every sufficiency box inside the reference box).
#[cfg(debug_assertions)]
#[allow(clippy::too_many_arguments)]
fn check_iteration_properties(
    prev: &IterationRecord,
    cur: &IterationRecord,
    params: &AlgoParams,
    q: usize,
    mode: &Mode<'_>,
    clip_events: u64,
    boxes_fit: bool,
    selected_delta: Option<f64>,
) {
    const TOL: f64 = 1e-10;
    let two_q = 2 * q as i32;
    debug_assert!(
        cur.hi >= prev.hi - TOL,
        "hypervolume decreased: {} -> {}",
        prev.hi,
        cur.hi
    );
    if clip_events > 0 || !boxes_fit {
        return;
    }
    let tilde_c = params.tilde_c(q);
    match mode {
        Mode::Strong => {
            let bound = -tilde_c * cur.delta_bar.powi(two_q);
            debug_assert!(
                cur.phi_delta - prev.phi_delta <= bound + TOL,
                "phi decrease violated at k={}: diff {} > bound {}",
                cur.k,
                cur.phi_delta - prev.phi_delta,
                bound
            );
            if cur.success {
                let hv_bound = if cur.delta_bar > prev.delta_bar {
                    (params.gamma * cur.delta_bar * cur.delta_bar).powi(q as i32)
                } else {
                    (params.gamma * params.c * params.c * cur.delta_bar * cur.delta_bar)
                        .powi(q as i32)
                };
                debug_assert!(
                    cur.hi - prev.hi >= hv_bound - TOL,
                    "hypervolume increase {} below bound {hv_bound} at k={}",
                    cur.hi - prev.hi,
                    cur.k
                );
            }
        }
        Mode::Light(strategy) => {
            if matches!(strategy, SelectionStrategy::MinMaxStep) {
                let bound = -tilde_c * cur.xi.powi(two_q);
                debug_assert!(
                    cur.phi_xi - prev.phi_xi <= bound + TOL,
                    "phi_xi decrease violated at k={}: diff {} > bound {}",
                    cur.k,
                    cur.phi_xi - prev.phi_xi,
                    bound
                );
            }
            if cur.success {
                let delta_k = selected_delta.expect("light iterations record the selected delta");
                let hv_bound =
                    (params.gamma * params.c * params.c * delta_k * delta_k).powi(q as i32);
                debug_assert!(
                    cur.hi - prev.hi >= hv_bound - TOL,
                    "hypervolume increase {} below bound {hv_bound} at k={}",
                    cur.hi - prev.hi,
                    cur.k
                );
            }
        }
    }
}
