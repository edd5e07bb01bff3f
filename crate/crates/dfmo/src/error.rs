//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by solvers, problems and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (parameter ranges, stopping rules, unknown names).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A value that must be finite was NaN or infinite.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// The objective oracle failed or returned an unusable value.
    #[error("objective evaluation failed at {point:?}: {reason}")]
    Oracle {
        /// Decision coordinates of the offending evaluation.
        point: Vec<f64>,
        /// What went wrong, including the raw reply for external objectives.
        reason: String,
    },

    /// The external objective replied with something outside the wire format.
    #[error("protocol violation: {0}")]
    Protocol(String),

    /// The external objective did not reply in time.
    #[error("external objective timed out after {millis} ms")]
    Timeout {
        /// Configured reply deadline.
        millis: u64,
    },

    /// The expansion step grew past the safety cap, which indicates an
    /// objective that keeps improving without bound along a direction.
    #[error("step expansion overflow on direction {direction}: step reached {beta:e}")]
    StepOverflow {
        /// Index of the search direction being expanded.
        direction: usize,
        /// Step length at the time the guard tripped.
        beta: f64,
    },

    /// A hypervolume reference point that fails to dominate the front.
    #[error("invalid reference point: {0}")]
    Reference(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
