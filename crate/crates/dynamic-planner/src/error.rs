use geometry_world::GeoError;
use pddl_core::{GroundError, ParseError};
use thiserror::Error;

/// Everything that can go wrong between a knowledge snapshot and a flight
/// plan. Note that an *unsolvable* task is not an error — it is a regular
/// [`PlanOutcome`](crate::PlanOutcome) — but a blown budget is, because it
/// proves nothing about the task.
#[derive(Debug, Error)]
pub enum DpError {
    /// The snapshot lacks state the problem builder cannot invent.
    #[error("snapshot is incomplete: no {missing} available")]
    IncompleteSnapshot { missing: &'static str },

    /// A telemetry fact exists but its value does not decode.
    #[error("telemetry fact ({predicate} {value}) does not name a valid {expected}")]
    BadTelemetry {
        predicate: &'static str,
        value: String,
        expected: &'static str,
    },

    /// The snapshot's situational map is framed on a different grid than
    /// the one the caller asked to plan over.
    #[error("snapshot map does not use the requested grid frame")]
    GeorefMismatch,

    #[error("invalid solver config: {reason}")]
    InvalidConfig { reason: String },

    /// A solve request that does not decode or names no task at all.
    #[error("malformed solve request: {reason}")]
    BadRequest { reason: String },

    /// The search ran out of its node, time, or step allowance before
    /// settling the task. `bound` is the best lower bound known at that
    /// point: no plan completing the search can cost less.
    #[error(
        "{resource} budget exhausted after {expanded} expansions; \
         any remaining plan costs at least {bound}"
    )]
    BudgetExhausted {
        resource: &'static str,
        expanded: u64,
        bound: u32,
    },

    /// A policy broke its contract by choosing an inapplicable action.
    #[error("policy '{policy}' chose {action}, which is not applicable in the current state")]
    PolicyContract { policy: String, action: String },

    /// A policy declined to choose although the goal is not yet reached.
    #[error("policy '{policy}' offered no action after {steps} steps")]
    PolicyFailed { policy: String, steps: u64 },

    #[error("no policy named '{0}' is shipped")]
    UnknownPolicy(String),

    /// A plan step could not be translated to flight geometry.
    #[error("cannot translate {signature}: its effect names no grid cell")]
    MalformedAction { signature: String },

    #[error(transparent)]
    Geo(#[from] GeoError),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Ground(#[from] GroundError),
}
