//! The dynamic-planning agent: knowledge snapshot in, validated flight
//! plan out.
//!
//! The pipeline is snapshot → problem text → grounded task → plan →
//! waypoints. Problems are rendered over the snapshot's grid frame with
//! the shipped survey domain (cardinal moves with fused turns, zero-cost
//! sector scans, target acquisition); plans come from best-first search
//! with an admissible distance estimate, or from a pluggable action policy
//! for rollout-style solving. The whole path is deterministic: equal
//! requests produce byte-identical problems and identical plans.

mod config;
mod domain;
mod error;
mod heuristic;
mod policy;
mod problem;
mod search;
mod service;
mod waypoints;

pub use config::{GoalSpec, SolverConfig, SolverMode, ThreatModel, DEFAULT_NODE_BUDGET};
pub use domain::{domain_for, domain_text, domain_with_soft_threats, parsed_domain_for};
pub use error::DpError;
pub use heuristic::SurveyEstimator;
pub use policy::{resolve_policy, ActionPolicy, GreedyPolicy};
pub use problem::build_problem;
pub use search::{rollout, solve, PlanOutcome, SolveReport, SolveStats};
pub use service::{
    register_service, solve_request, SolveRequest, SolveResponse, SolveVerdict, SERVICE,
};
pub use waypoints::{plan_to_waypoints, FlightPlan, GimbalCommand};
