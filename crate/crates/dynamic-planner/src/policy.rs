//! The pluggable action-selection slot.
//!
//! Solving by search is this artifact's reference engine; the policy
//! interface is the seam where a learned selector would drop in, exercised
//! end to end by the shipped greedy baseline.

use pddl_core::{GroundedTask, State};

use crate::error::DpError;
use crate::heuristic::SurveyEstimator;

/// Chooses the next action for a rollout. Implementations must return an
/// action applicable in `state`; the rollout enforces this with a runtime
/// check and fails the solve on violation.
pub trait ActionPolicy {
    /// Name used in configs, errors, and logs.
    fn id(&self) -> &str;

    /// The chosen action id, or `None` to give up in this state.
    fn choose_action(&mut self, task: &GroundedTask, state: &State) -> Option<usize>;
}

/// Baseline policy: the applicable action whose successor state minimizes
/// the survey estimate, ties broken by grounded-action index. Memoryless —
/// on estimate plateaus it can cycle until the step budget ends the
/// rollout.
pub struct GreedyPolicy {
    estimator: SurveyEstimator,
}

impl GreedyPolicy {
    pub fn for_task(task: &GroundedTask) -> GreedyPolicy {
        GreedyPolicy {
            estimator: SurveyEstimator::for_task(task),
        }
    }
}

impl ActionPolicy for GreedyPolicy {
    fn id(&self) -> &str {
        "greedy"
    }

    fn choose_action(&mut self, task: &GroundedTask, state: &State) -> Option<usize> {
        let mut best: Option<(u32, usize)> = None;
        for id in 0..task.actions.len() {
            if !task.applicable(state, id) {
                continue;
            }
            let h = self.estimator.estimate(&task.apply(state, id));
            match best {
                Some((best_h, _)) if best_h <= h => {}
                _ => best = Some((h, id)),
            }
        }
        best.map(|(_, id)| id)
    }
}

/// Resolves a configured policy id to a shipped implementation.
pub fn resolve_policy(id: &str, task: &GroundedTask) -> Result<Box<dyn ActionPolicy>, DpError> {
    match id {
        "greedy" => Ok(Box::new(GreedyPolicy::for_task(task))),
        other => Err(DpError::UnknownPolicy(other.to_string())),
    }
}
