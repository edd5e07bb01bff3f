//! Derivative-free multi-objective optimization with expanding linesearches.
//!
//! The solvers keep a list of mutually non-dominated points, each carrying
//! per-direction stepsizes. An iteration explores around list entries with a
//! per-direction expansion: trial steps grow geometrically for as long as the
//! trial point is sufficiently non-dominated by everything found so far.
//! Failed explorations shrink the entry's stepsizes; accepted points join the
//! list, which is then re-filtered to its non-dominated subset.
//!
//! Two drivers are provided. [`algorithms::dfmo_strong`] explores every list
//! entry per iteration and carries list-wide guarantees;
//! [`algorithms::dfmo_light`] explores a single selected entry per iteration
//! (selection by smallest or largest maximum stepsize, round robin, or a user
//! hook). Instrumentation records hypervolume, the cost function and
//! stepsize extremes per iteration, and optional criticality measures based
//! on finite differences.
//!
//! ```
//! use dfmo::run::{run, RunConfig};
//!
//! let config = RunConfig {
//!     max_iters: Some(25),
//!     ..RunConfig::default()
//! };
//! let artifacts = run(&config).unwrap();
//! assert!(!artifacts.final_front.is_empty());
//! ```
//!
//! The `dfmo` binary wraps this API: `dfmo run` writes the final front, the
//! iteration trace and the lineage of every produced point in CSV or JSON,
//! and `dfmo serve` exposes a built-in problem over a line protocol for
//! external evaluation.

pub mod algorithms;
pub mod cli;
pub mod criticality;
pub mod directions;
pub mod error;
pub mod hypervolume;
pub mod linesearch;
pub mod oracle;
pub mod params;
pub mod problems;
pub mod protocol;
pub mod run;
pub mod trace;
pub mod types;

pub use algorithms::{
    dfmo_light, dfmo_strong, IterationRecord, SelectionStrategy, SolveOptions, SolveResult,
    StopReason,
};
pub use directions::{make_directions, DirectionSet};
pub use error::{Error, Result};
pub use hypervolume::{
    hv_increase, hypervolume, hypervolume_mc, make_reference, ReferencePoint,
};
pub use linesearch::{approximate_optimization, ExplorationResult};
pub use oracle::{EvalBudget, Objective};
pub use params::{AlgoParams, StoppingRule};
pub use problems::{builtin, external_blackbox, Problem};
pub use types::{
    dominates, filter_nondominated, sufficiently_nondominated, DecisionPoint, EntryId,
    ListEntry, ObjectiveVector, ParetoList, StepsizeVector,
};
