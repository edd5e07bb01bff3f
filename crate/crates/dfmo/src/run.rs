//! Run configuration, dispatch and artifact assembly.

use serde::Serialize;

use crate::algorithms::{
    dfmo_light, dfmo_strong, IterationRecord, LineageEdge, SelectionStrategy, SolveOptions,
    SolveResult, StopReason,
};
use crate::directions::make_directions;
use crate::error::{Error, Result};
use crate::oracle::Objective;
use crate::params::{AlgoParams, StoppingRule};
use crate::problems::{builtin, external_blackbox, Problem};
use crate::types::{DecisionPoint, ObjectiveVector, ParetoList, StepsizeVector};

/// Which objective to run against.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSpec {
    Builtin { name: String },
    External { cmd: String, n: usize, q: usize },
}

/// Which outer driver to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgoKind {
    Strong,
    Light,
}

/// Selection rule for the light driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Min,
    Max,
    RoundRobin,
}

impl StrategyKind {
    fn to_strategy(self) -> SelectionStrategy {
        match self {
            StrategyKind::Min => SelectionStrategy::MinMaxStep,
            StrategyKind::Max => SelectionStrategy::MaxMaxStep,
            StrategyKind::RoundRobin => SelectionStrategy::RoundRobin,
        }
    }
}

/// User-facing run configuration. `eta = None` resolves to `γ^q / 2` once
/// the objective count is known.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub algo: AlgoKind,
    pub strategy: StrategyKind,
    pub theta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub c: f64,
    pub eta: Option<f64>,
    pub s: f64,
    pub r_extra: usize,
    /// Initial stepsize for every direction of every starting point.
    pub alpha0: f64,
    pub seed: u64,
    pub max_iters: Option<u64>,
    pub max_evals: Option<u64>,
    pub delta_tol: Option<f64>,
    pub fd_step: f64,
    /// Explicit reference point; otherwise derived from the initial list.
    pub ref_point: Option<Vec<f64>>,
    pub trace_criticality: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemSpec::Builtin {
                name: "remark_a1".into(),
            },
            algo: AlgoKind::Strong,
            strategy: StrategyKind::Min,
            theta: 0.5,
            gamma: 0.5,
            delta: 0.5,
            c: 0.9,
            eta: None,
            s: 1.0,
            r_extra: 0,
            alpha0: 1.0,
            seed: 0,
            max_iters: Some(1000),
            max_evals: None,
            delta_tol: None,
            fd_step: 1e-5,
            ref_point: None,
            trace_criticality: false,
        }
    }
}

/// Every value the run actually used, defaults included; enough to reproduce
/// the run bit-identically.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub problem: ProblemSpec,
    pub algo: AlgoKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyKind>,
    pub theta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub c: f64,
    pub eta: f64,
    pub s: f64,
    pub r: usize,
    pub r_extra: usize,
    pub alpha0: f64,
    pub seed: u64,
    pub max_iters: Option<u64>,
    pub max_evals: Option<u64>,
    pub delta_tol: Option<f64>,
    pub fd_step: f64,
    /// The reference point the run used, whether supplied or derived.
    pub ref_point: Vec<f64>,
    pub trace_criticality: bool,
}

/// Evaluation ledgers of a finished run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Counters {
    pub nf_algorithm: u64,
    pub nf_diagnostic: u64,
}

/// Everything a run produces.
#[derive(Debug)]
pub struct RunArtifacts {
    pub final_front: ParetoList,
    pub trace: Vec<IterationRecord>,
    pub lineage: Vec<LineageEdge>,
    pub config_echo: ResolvedConfig,
    pub counters: Counters,
    pub stop: StopReason,
    pub clip_events: u64,
}

impl RunArtifacts {
    pub fn truncated(&self) -> bool {
        self.stop == StopReason::EvalBudget
    }
}

fn build_problem(spec: &ProblemSpec) -> Result<Problem> {
    match spec {
        ProblemSpec::Builtin { name } => builtin(name),
        ProblemSpec::External { cmd, n, q } => external_blackbox(cmd, *n, *q, None),
    }
}

/// Builds the configured problem, dispatches to the configured driver and
/// assembles the artifacts.
pub fn run(config: &RunConfig) -> Result<RunArtifacts> {
    let mut problem = build_problem(&config.problem)?;
    let n = problem.n();
    let q = problem.q();
    let r = 2 * n + config.r_extra;
    let eta = config.eta.unwrap_or_else(|| config.gamma.powi(q as i32) / 2.0);
    let params = AlgoParams {
        theta: config.theta,
        gamma: config.gamma,
        delta: config.delta,
        c: config.c,
        eta,
        s: config.s,
        r,
        seed: config.seed,
        stop: StoppingRule {
            max_iters: config.max_iters,
            max_evals: config.max_evals,
            delta_tol: config.delta_tol,
        },
    };
    params.validate(q)?;
    if !config.alpha0.is_finite() || config.alpha0 <= 0.0 {
        return Err(Error::Config(format!(
            "alpha0 must be strictly positive, got {}",
            config.alpha0
        )));
    }
    let directions = make_directions(n, config.r_extra, config.seed)?;
    let starts: Vec<(DecisionPoint, StepsizeVector)> = problem
        .suggested_start()
        .iter()
        .map(|p| {
            Ok((
                p.clone(),
                StepsizeVector::uniform(r, config.alpha0)?,
            ))
        })
        .collect::<Result<_>>()?;
    let options = SolveOptions {
        rho_override: config
            .ref_point
            .as_ref()
            .map(|v| ObjectiveVector::new(v.clone()))
            .transpose()?,
        fd_step: config.fd_step,
        trace_criticality: config.trace_criticality,
    };

    let result: SolveResult = match config.algo {
        AlgoKind::Strong => dfmo_strong(&mut problem, &starts, &directions, &params, &options)?,
        AlgoKind::Light => dfmo_light(
            &mut problem,
            &starts,
            &directions,
            &params,
            &config.strategy.to_strategy(),
            &options,
        )?,
    };

    let config_echo = ResolvedConfig {
        problem: config.problem.clone(),
        algo: config.algo,
        strategy: matches!(config.algo, AlgoKind::Light).then_some(config.strategy),
        theta: config.theta,
        gamma: config.gamma,
        delta: config.delta,
        c: config.c,
        eta,
        s: config.s,
        r,
        r_extra: config.r_extra,
        alpha0: config.alpha0,
        seed: config.seed,
        max_iters: config.max_iters,
        max_evals: config.max_evals,
        delta_tol: config.delta_tol,
        fd_step: config.fd_step,
        ref_point: result.rho.values().to_vec(),
        trace_criticality: config.trace_criticality,
    };
    Ok(RunArtifacts {
        final_front: result.final_list,
        trace: result.trace,
        lineage: result.lineage,
        config_echo,
        counters: Counters {
            nf_algorithm: result.nf_algorithm,
            nf_diagnostic: result.nf_diagnostic,
        },
        stop: result.stop,
        clip_events: result.clip_events,
    })
}
