//! Adopted plan instances and their lifecycle.

use knowledge::Binding;
use serde::{Deserialize, Serialize};

/// Where an adopted plan is in its life.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntentionStatus {
    /// Scheduled to execute; a `wait-for` step idles here without leaving it.
    Active,
    /// Parked — on a pending planning request, or suspended by a
    /// higher-utility adoption.
    Waiting,
    /// Ran its whole body; effects have been asserted.
    Succeeded,
    /// Context violated, a step failed, or the planning service gave up.
    Failed,
}

impl IntentionStatus {
    pub fn is_terminal(self) -> bool {
        matches!(self, IntentionStatus::Succeeded | IntentionStatus::Failed)
    }
}

/// Why a `Waiting` intention is parked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum WaitState {
    /// A planning request is in flight; `correlation` claims its response.
    Planner { correlation: u64 },
    /// Suspended by a higher-utility adoption; resumable once the
    /// interloper ends and the context still holds.
    Preempted,
}

/// One adopted plan: which plan, with which precondition bindings, how far
/// through the body it is, and whether it is running, parked, or done.
#[derive(Debug, Clone)]
pub struct Intention {
    pub plan: String,
    pub goal: String,
    pub bindings: Binding,
    /// Program counter: index of the next body step to execute.
    pub pc: usize,
    pub status: IntentionStatus,
    /// Index into the package's plan list (stable across the run).
    pub(crate) plan_index: usize,
    pub(crate) wait: Option<WaitState>,
}

impl Intention {
    pub(crate) fn new(plan: &str, goal: &str, bindings: Binding, plan_index: usize) -> Intention {
        Intention {
            plan: plan.to_string(),
            goal: goal.to_string(),
            bindings,
            pc: 0,
            status: IntentionStatus::Active,
            plan_index,
            wait: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_serialization_is_lowercase() {
        let s = serde_json::to_string(&IntentionStatus::Active).unwrap();
        assert_eq!(s, "\"active\"");
        let s = serde_json::to_string(&IntentionStatus::Succeeded).unwrap();
        assert_eq!(s, "\"succeeded\"");
    }

    #[test]
    fn only_end_states_are_terminal() {
        assert!(!IntentionStatus::Active.is_terminal());
        assert!(!IntentionStatus::Waiting.is_terminal());
        assert!(IntentionStatus::Succeeded.is_terminal());
        assert!(IntentionStatus::Failed.is_terminal());
    }
}
