//! The planning agent as a bus service.
//!
//! `dp.solve` is stateless between requests: everything the solver may use
//! travels inside the request, so replaying a request reproduces its
//! response bit for bit. Several instances could serve a bus concurrently;
//! each solve runs single-threaded.

use agent_bus::{Bus, BusError, Envelope, HandlerOutcome};
use geometry_world::Waypoint;
use knowledge::KnowledgeSnapshot;
use pddl_core::{ground, parse_problem};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{GoalSpec, SolverConfig};
use crate::domain::parsed_domain_for;
use crate::error::DpError;
use crate::problem::build_problem;
use crate::search::{solve, PlanOutcome, SolveStats};
use crate::waypoints::{plan_to_waypoints, FlightPlan, GimbalCommand};

/// Service name the planning agent answers under.
pub const SERVICE: &str = "dp.solve";

/// A solve request: either ready-made problem text, or a snapshot plus
/// goal for the service to render itself. Exactly one of the two forms
/// must be used — a request naming both (or neither) is rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SolveRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot: Option<KnowledgeSnapshot>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<GoalSpec>,
    #[serde(default)]
    pub config: SolverConfig,
}

impl SolveRequest {
    /// Snapshot-form request with default solver config.
    pub fn for_snapshot(snapshot: KnowledgeSnapshot, goal: GoalSpec) -> SolveRequest {
        SolveRequest {
            problem: None,
            snapshot: Some(snapshot),
            goal: Some(goal),
            config: SolverConfig::default(),
        }
    }

    /// Problem-text request with default solver config. No grid frame is
    /// known in this form, so the response carries no waypoints.
    pub fn for_problem(problem: impl Into<String>) -> SolveRequest {
        SolveRequest {
            problem: Some(problem.into()),
            snapshot: None,
            goal: None,
            config: SolverConfig::default(),
        }
    }
}

/// How a request settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveVerdict {
    Solved,
    Unsolvable,
}

/// A settled solve request. `problem` echoes the exact text solved so the
/// caller can persist it alongside the plan for offline inspection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SolveResponse {
    pub verdict: SolveVerdict,
    /// Plan steps in signature form, one entry per step, empty when
    /// unsolvable.
    pub actions: Vec<String>,
    pub cost: Option<u32>,
    pub waypoints: Vec<Waypoint>,
    pub gimbal: Vec<GimbalCommand>,
    pub stats: SolveStats,
    pub problem: String,
}

/// Answers one request end to end: render (or accept) the problem, ground
/// it against the configured threat model's domain, solve, and translate
/// the plan to waypoints when a grid frame is known.
pub fn solve_request(req: &SolveRequest) -> Result<SolveResponse, DpError> {
    let (text, frame) = match (&req.problem, &req.snapshot, &req.goal) {
        (Some(text), None, None) => (text.clone(), None),
        (None, Some(snap), Some(goal)) => {
            let georef = snap
                .map
                .as_ref()
                .ok_or(DpError::IncompleteSnapshot {
                    missing: "situational map",
                })?
                .georef()
                .clone();
            let text = build_problem(snap, goal, &georef)?;
            (text, Some((georef, goal.reentry_alt)))
        }
        (None, None, _) => {
            return Err(DpError::BadRequest {
                reason: "either problem text or snapshot+goal is required".into(),
            })
        }
        _ => {
            return Err(DpError::BadRequest {
                reason: "problem text and snapshot forms are mutually exclusive".into(),
            })
        }
    };

    let domain = parsed_domain_for(req.config.threats);
    let task = ground(&domain, &parse_problem(&text, &domain)?)?;
    let report = solve(&task, &req.config)?;

    let (verdict, actions, cost, flight) = match report.outcome {
        PlanOutcome::Solved(plan) => {
            let flight = match &frame {
                Some((georef, alt)) => plan_to_waypoints(&plan, &task, georef, *alt)?,
                None => FlightPlan::default(),
            };
            let actions = plan
                .actions
                .iter()
                .map(|&a| task.actions[a].signature())
                .collect();
            (SolveVerdict::Solved, actions, Some(plan.total_cost), flight)
        }
        PlanOutcome::Unsolvable => (
            SolveVerdict::Unsolvable,
            Vec::new(),
            None,
            FlightPlan::default(),
        ),
    };
    Ok(SolveResponse {
        verdict,
        actions,
        cost,
        waypoints: flight.waypoints,
        gimbal: flight.gimbal,
        stats: report.stats,
        problem: text,
    })
}

/// Registers the planning agent on a bus under [`SERVICE`]. Requests are
/// answered synchronously; failures surface as handler faults.
pub fn register_service(bus: &mut Bus) -> Result<(), BusError> {
    bus.register(SERVICE, |env| match handle(env) {
        Ok(v) => HandlerOutcome::Reply(v),
        Err(e) => HandlerOutcome::Error(e.to_string()),
    })
}

fn handle(env: &Envelope) -> Result<Value, DpError> {
    let req: SolveRequest =
        serde_json::from_value(env.payload.clone()).map_err(|e| DpError::BadRequest {
            reason: e.to_string(),
        })?;
    let resp = solve_request(&req)?;
    Ok(serde_json::to_value(resp).expect("response serializes"))
}
