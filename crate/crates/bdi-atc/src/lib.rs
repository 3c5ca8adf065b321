//! Goal-directed mission control over the shared bus.
//!
//! The crate turns a mission package — procedural plan specifications,
//! initial beliefs, and inference rules in s-expression files — into live
//! behaviour. An event-translation layer turns bus traffic (telemetry,
//! detections, shared simulator events, progress reports) into beliefs;
//! the agent then runs a fixed decision cycle: refresh beliefs, re-derive
//! inferences, guard the running intention's context, pick the best
//! applicable plan by utility, and execute exactly one plan step —
//! emitting symbolic commands on [`TOPIC_ATC_COMMANDS`] and consulting
//! the planning service when a plan asks for it.
//!
//! The bus is the agent's only connection to the world: everything it
//! believes arrived through a subscription, and everything it decides
//! leaves as an envelope. Replaying the same traffic reproduces the same
//! trace, beliefs and all.

mod agent;
mod error;
mod events;
mod intention;
mod package;

pub use agent::{
    applicable_plans, Agent, AtcCommand, Candidate, DP_TIMEOUT_TICKS, SENDER, TOPIC_ATC_COMMANDS,
    TOPIC_DP_SOLUTIONS,
};
pub use error::AtcError;
pub use events::{ingest, TOPIC_STATUS};
pub use intention::{Intention, IntentionStatus};
pub use package::{
    demo_package, demo_sources, load_mission_package, parse_package, MissionPackage, PackageSource,
    PlanSpec, PlanStep,
};
