use geometry_world::{CellCoord, SituationalMap};
use serde::{Deserialize, Serialize};

use crate::error::DpError;

/// Default ceiling on best-first expansions (and policy rollout steps)
/// before a solve attempt gives up with a budget error.
pub const DEFAULT_NODE_BUDGET: u64 = 500_000;

/// What a produced plan must accomplish: secure a target (when any are
/// listed) and end up at the exit cell toward the resumed route.
///
/// The acquisition objective is satisfied once *any* known target cell has
/// been scanned and acquired; `acquire` names the detections that motivated
/// the goal and pins them inside the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct GoalSpec {
    /// Target cells whose acquisition is required; empty for pure transit.
    #[serde(default)]
    pub acquire: Vec<CellCoord>,
    /// Cell the vehicle must occupy when the plan ends.
    pub final_cell: CellCoord,
    /// Altitude (meters) for the produced acquisition waypoints.
    pub reentry_alt: f64,
}

impl GoalSpec {
    /// Transit-only goal: reach `final_cell`, no acquisition required.
    pub fn transit(final_cell: CellCoord, reentry_alt: f64) -> GoalSpec {
        GoalSpec {
            acquire: Vec::new(),
            final_cell,
            reentry_alt,
        }
    }

    /// Acquisition goal over every target currently on the map.
    pub fn acquire_mapped(map: &SituationalMap, final_cell: CellCoord, reentry_alt: f64) -> GoalSpec {
        GoalSpec {
            acquire: map.target_cells(),
            final_cell,
            reentry_alt,
        }
    }
}

/// Which engine answers a solve request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverMode {
    /// Best-first search with an admissible heuristic: minimum-cost plans.
    Optimal,
    /// Greedy rollout of a named action policy; fast, not optimal.
    Policy,
}

/// How known threat cells constrain motion. `Hard` forbids entering them
/// outright; `Soft` admits entry at `penalty` extra cost per threat cell,
/// for missions that accept exposure when no clean route exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThreatModel {
    Hard,
    Soft { penalty: u32 },
}

/// Solve-time knobs. The defaults are what the mission stack uses: optimal
/// mode, hard threats, a node budget and no wall-clock limit (repeatable
/// runs must not depend on machine speed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SolverConfig {
    pub mode: SolverMode,
    /// Policy id when `mode` is `Policy`; ignored otherwise.
    pub policy: Option<String>,
    /// Expansion (or rollout step) ceiling; must be positive.
    pub node_budget: u64,
    /// Optional wall-clock ceiling in milliseconds; must be positive.
    pub time_budget_ms: Option<u64>,
    pub threats: ThreatModel,
}

impl Default for SolverConfig {
    fn default() -> SolverConfig {
        SolverConfig {
            mode: SolverMode::Optimal,
            policy: None,
            node_budget: DEFAULT_NODE_BUDGET,
            time_budget_ms: None,
            threats: ThreatModel::Hard,
        }
    }
}

impl SolverConfig {
    /// Rejects configs that cannot possibly be meant: zero budgets, or
    /// policy mode without a policy to run.
    pub fn check(&self) -> Result<(), DpError> {
        if self.node_budget == 0 {
            return Err(DpError::InvalidConfig {
                reason: "node budget must be positive".into(),
            });
        }
        if self.time_budget_ms == Some(0) {
            return Err(DpError::InvalidConfig {
                reason: "time budget must be positive".into(),
            });
        }
        if self.mode == SolverMode::Policy && self.policy.is_none() {
            return Err(DpError::InvalidConfig {
                reason: "policy mode requires a policy id".into(),
            });
        }
        Ok(())
    }
}
