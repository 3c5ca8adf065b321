//! Best-first search and policy rollout over grounded tasks.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};
use std::time::{Duration, Instant};

use pddl_core::{validate_plan, GroundedTask, Plan, State};
use serde::{Deserialize, Serialize};

use crate::config::{SolverConfig, SolverMode};
use crate::error::DpError;
use crate::heuristic::SurveyEstimator;
use crate::policy::{resolve_policy, ActionPolicy};

/// Search effort counters. Wall time is measured but never serialized:
/// logged artifacts must not vary with machine speed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    /// States expanded (optimal mode) or rollout steps taken (policy mode).
    pub expanded: u64,
    /// States generated, counting duplicates reached again.
    pub generated: u64,
    #[serde(skip)]
    pub wall: Duration,
}

/// How a solve attempt settled the task.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanOutcome {
    Solved(Plan),
    /// Proven: the search space is exhausted (or relaxed reachability
    /// already refutes the goal). Not an error — the caller decides what a
    /// mission does without a plan.
    Unsolvable,
}

/// A settled solve attempt with its effort counters.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub outcome: PlanOutcome,
    pub stats: SolveStats,
}

/// Solves a grounded task per `cfg`: minimum-cost search in optimal mode,
/// a rollout of the configured policy in policy mode. Plans returned are
/// guaranteed valid; budget exhaustion is an error carrying the best lower
/// bound established so far.
pub fn solve(task: &GroundedTask, cfg: &SolverConfig) -> Result<SolveReport, DpError> {
    cfg.check()?;
    match cfg.mode {
        SolverMode::Optimal => astar(task, cfg),
        SolverMode::Policy => {
            let id = cfg.policy.as_deref().expect("checked by cfg.check");
            let mut policy = resolve_policy(id, task)?;
            rollout(task, policy.as_mut(), cfg)
        }
    }
}

struct Node {
    state: State,
    g: u32,
    parent: Option<(u32, u32)>, // (node index, action id)
}

/// Open-list entry ordered ascending by (f, insertion sequence). Successors
/// are generated in grounded-action-index order, so the sequence number
/// makes tie-breaking deterministic and index-ordered.
struct OpenEntry {
    f: u32,
    seq: u64,
    node: u32,
    g: u32,
}

impl PartialEq for OpenEntry {
    fn eq(&self, other: &Self) -> bool {
        (self.f, self.seq) == (other.f, other.seq)
    }
}
impl Eq for OpenEntry {}
impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OpenEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we pop the smallest (f, seq).
        (other.f, other.seq).cmp(&(self.f, self.seq))
    }
}

/// Ids of the actions that can contribute to the goal, in index order.
///
/// Backward chaining from the goal: an action is relevant when it adds a
/// needed fact, and its preconditions become needed in turn. Removing an
/// irrelevant action from any plan leaves a pointwise-superset state
/// sequence — preconditions are positive after grounding, so the rest of
/// the plan stays applicable at no greater cost. Searching the relevant
/// subset therefore preserves optimality, and it is what keeps zero-cost
/// sensor actions from flooding the open list with mission-irrelevant
/// coverage states.
fn relevant_actions(task: &GroundedTask) -> Vec<usize> {
    let mut needed = State::with_capacity(task.num_facts());
    for &g in &task.goal {
        needed.insert(g);
    }
    let mut relevant = vec![false; task.actions.len()];
    let mut changed = true;
    while changed {
        changed = false;
        for (id, a) in task.actions.iter().enumerate() {
            if relevant[id] || !a.add.iter().any(|&f| needed.contains(f)) {
                continue;
            }
            relevant[id] = true;
            changed = true;
            for &p in &a.pre {
                needed.insert(p);
            }
        }
    }
    (0..task.actions.len()).filter(|&id| relevant[id]).collect()
}

fn astar(task: &GroundedTask, cfg: &SolverConfig) -> Result<SolveReport, DpError> {
    let start = Instant::now();
    let mut stats = SolveStats::default();
    if !task.relaxed_solvable {
        stats.wall = start.elapsed();
        return Ok(SolveReport {
            outcome: PlanOutcome::Unsolvable,
            stats,
        });
    }

    let estimator = SurveyEstimator::for_task(task);
    let actions = relevant_actions(task);
    let time_budget = cfg.time_budget_ms.map(Duration::from_millis);

    let mut nodes: Vec<Node> = Vec::new();
    let mut index: HashMap<State, u32> = HashMap::new();
    let mut open: BinaryHeap<OpenEntry> = BinaryHeap::new();
    let mut seq: u64 = 0;

    nodes.push(Node {
        state: task.init.clone(),
        g: 0,
        parent: None,
    });
    index.insert(task.init.clone(), 0);
    open.push(OpenEntry {
        f: estimator.estimate(&task.init),
        seq,
        node: 0,
        g: 0,
    });
    stats.generated = 1;

    while let Some(entry) = open.pop() {
        if entry.g > nodes[entry.node as usize].g {
            continue; // superseded by a cheaper path found later
        }
        if stats.expanded >= cfg.node_budget {
            return Err(DpError::BudgetExhausted {
                resource: "node",
                expanded: stats.expanded,
                bound: entry.f,
            });
        }
        if let Some(limit) = time_budget {
            if stats.expanded % 512 == 0 && start.elapsed() > limit {
                return Err(DpError::BudgetExhausted {
                    resource: "time",
                    expanded: stats.expanded,
                    bound: entry.f,
                });
            }
        }
        stats.expanded += 1;

        if task.is_goal(&nodes[entry.node as usize].state) {
            let plan = extract_plan(task, &nodes, entry.node);
            debug_assert!(validate_plan(task, &plan).valid);
            stats.wall = start.elapsed();
            return Ok(SolveReport {
                outcome: PlanOutcome::Solved(plan),
                stats,
            });
        }

        for &action in &actions {
            let here = &nodes[entry.node as usize];
            if !task.applicable(&here.state, action) {
                continue;
            }
            let g = here.g + task.actions[action].cost;
            let succ = task.apply(&here.state, action);
            stats.generated += 1;
            let node = match index.entry(succ) {
                Entry::Occupied(known) => {
                    let id = *known.get();
                    if g >= nodes[id as usize].g {
                        continue;
                    }
                    nodes[id as usize].g = g;
                    nodes[id as usize].parent = Some((entry.node, action as u32));
                    id
                }
                Entry::Vacant(fresh) => {
                    let id = nodes.len() as u32;
                    nodes.push(Node {
                        state: fresh.key().clone(),
                        g,
                        parent: Some((entry.node, action as u32)),
                    });
                    fresh.insert(id);
                    id
                }
            };
            seq += 1;
            open.push(OpenEntry {
                f: g + estimator.estimate(&nodes[node as usize].state),
                seq,
                node,
                g,
            });
        }
    }

    stats.wall = start.elapsed();
    Ok(SolveReport {
        outcome: PlanOutcome::Unsolvable,
        stats,
    })
}

fn extract_plan(task: &GroundedTask, nodes: &[Node], goal: u32) -> Plan {
    let mut actions = Vec::new();
    let mut cursor = goal;
    while let Some((parent, action)) = nodes[cursor as usize].parent {
        actions.push(action as usize);
        cursor = parent;
    }
    actions.reverse();
    Plan::new(actions, task)
}

/// Runs `policy` from the initial state until the goal, a contract breach,
/// or the step/time budget. Per contract every chosen action must be
/// applicable; a policy that terminates in the goal therefore always yields
/// a valid plan.
pub fn rollout(
    task: &GroundedTask,
    policy: &mut dyn ActionPolicy,
    cfg: &SolverConfig,
) -> Result<SolveReport, DpError> {
    cfg.check()?;
    let start = Instant::now();
    let mut stats = SolveStats::default();
    if !task.relaxed_solvable {
        stats.wall = start.elapsed();
        return Ok(SolveReport {
            outcome: PlanOutcome::Unsolvable,
            stats,
        });
    }
    let time_budget = cfg.time_budget_ms.map(Duration::from_millis);

    let mut state = task.init.clone();
    let mut actions = Vec::new();
    let mut cost = 0u32;
    while !task.is_goal(&state) {
        if stats.expanded >= cfg.node_budget {
            return Err(DpError::BudgetExhausted {
                resource: "step",
                expanded: stats.expanded,
                bound: cost,
            });
        }
        if let Some(limit) = time_budget {
            if stats.expanded % 512 == 0 && start.elapsed() > limit {
                return Err(DpError::BudgetExhausted {
                    resource: "time",
                    expanded: stats.expanded,
                    bound: cost,
                });
            }
        }
        let Some(action) = policy.choose_action(task, &state) else {
            return Err(DpError::PolicyFailed {
                policy: policy.id().to_string(),
                steps: stats.expanded,
            });
        };
        if !task.applicable(&state, action) {
            return Err(DpError::PolicyContract {
                policy: policy.id().to_string(),
                action: task.actions[action].signature(),
            });
        }
        state = task.apply(&state, action);
        cost += task.actions[action].cost;
        actions.push(action);
        stats.expanded += 1;
        stats.generated += 1;
    }

    let plan = Plan::new(actions, task);
    debug_assert!(validate_plan(task, &plan).valid);
    stats.wall = start.elapsed();
    Ok(SolveReport {
        outcome: PlanOutcome::Solved(plan),
        stats,
    })
}
