//! The deliberation engine.
//!
//! [`Agent::bdi_step`] runs one decision cycle over the shared bus:
//!
//! 1. advance the belief clock and ingest everything the subscriptions
//!    collected since the last cycle;
//! 2. claim any planning-service response owed to the parked intention;
//! 3. re-derive inferred beliefs from the package rules;
//! 4. re-check the running intention's context, failing it on violation;
//! 5. fill the execution slot — preempt, resume, or adopt, by utility
//!    with declaration order breaking ties;
//! 6. execute exactly one body step of the active intention.
//!
//! One intention executes at a time. A higher-utility plan becoming
//! applicable suspends the running intention (resumable later if its
//! context still holds); a pending planning request parks its intention
//! and keeps the slot, so nothing else runs while the answer is due — a
//! committed solve is not worth abandoning for at most a few cycles of
//! idleness. Goal labels are single-attempt: once any intention has
//! carried a goal, no further intention is adopted for it.

use agent_bus::{Bus, Envelope, Subscription};
use dynamic_planner::{GoalSpec, SolveRequest, SolveResponse, SolveVerdict};
use geometry_world::{position_to_cell, CellCoord};
use knowledge::{Binding, KnowledgeStore, PatTerm, Pattern, Source, Term};
use serde_json::{json, Value};
use sil_sim::{MissionLog, TOPIC_DETECTIONS, TOPIC_EVENTS, TOPIC_TELEMETRY};

use crate::error::AtcError;
use crate::events::{self, TOPIC_STATUS};
use crate::intention::{Intention, IntentionStatus, WaitState};
use crate::package::{MissionPackage, PlanStep};

/// Topic carrying every command the agent emits, in emission order.
pub const TOPIC_ATC_COMMANDS: &str = "atc-commands";
/// Topic on which decoded planning-service responses are re-published for
/// whoever flies them.
pub const TOPIC_DP_SOLUTIONS: &str = "dp-solutions";
/// The agent's sender name on the bus.
pub const SENDER: &str = "atc";
/// Ticks before an unanswered planning request times out and fails the
/// requesting intention.
pub const DP_TIMEOUT_TICKS: u64 = 240;

/// Belief naming the cell a planning request must end in.
const GOAL_CELL_PRED: &str = "dp-goal-cell";
/// Belief naming the altitude for planned acquisition waypoints.
const REENTRY_ALT_PRED: &str = "dp-reentry-alt";

/// One symbolic command published for the command-translation layer.
#[derive(Debug, Clone, PartialEq)]
pub struct AtcCommand {
    pub plan: String,
    /// Body step index the command came from.
    pub step: usize,
    pub name: String,
    pub args: Vec<Term>,
}

/// One plan the current beliefs admit, with every way its precondition
/// matched. Candidates come back sorted: utility descending, then
/// declaration order.
#[derive(Debug, Clone)]
pub struct Candidate {
    /// Index into the package's plan list.
    pub plan: usize,
    pub utility: i64,
    /// Match order follows fact revision order, so it is deterministic.
    pub bindings: Vec<Binding>,
}

/// All plans whose preconditions match the current beliefs, best first.
pub fn applicable_plans(package: &MissionPackage, ks: &KnowledgeStore) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = package
        .plans
        .iter()
        .enumerate()
        .filter_map(|(i, plan)| {
            let bindings = ks.match_all(&plan.precondition);
            if bindings.is_empty() {
                None
            } else {
                Some(Candidate {
                    plan: i,
                    utility: plan.utility,
                    bindings,
                })
            }
        })
        .collect();
    out.sort_by(|a, b| b.utility.cmp(&a.utility).then(a.plan.cmp(&b.plan)));
    out
}

/// The deliberating agent: beliefs, the intention record, and the bus
/// subscriptions feeding both.
pub struct Agent {
    package: MissionPackage,
    ks: KnowledgeStore,
    /// Every intention ever adopted, in adoption order. Terminal ones stay
    /// for the goal-label ledger and post-run inspection.
    intentions: Vec<Intention>,
    /// The execution slot: the intention that owns the cycle, running or
    /// parked on the planner.
    current: Option<usize>,
    /// Preempted intentions, innermost last.
    suspended: Vec<usize>,
    subs: Vec<Subscription>,
    /// Correlation ids whose intention died before the answer came; late
    /// responses are claimed and dropped so they cannot leak.
    stale_requests: Vec<u64>,
}

impl Agent {
    /// Wires an agent over a validated package: subscribes to the
    /// simulator and status topics and seeds the store with the package's
    /// initial facts.
    pub fn new(package: MissionPackage, bus: &mut Bus) -> Agent {
        let mut ks = KnowledgeStore::new();
        for (predicate, args) in &package.facts {
            ks.assert_fact(predicate, args.clone(), Source::MissionPackage);
        }
        let subs = [TOPIC_TELEMETRY, TOPIC_DETECTIONS, TOPIC_EVENTS, TOPIC_STATUS]
            .iter()
            .map(|t| bus.subscribe(t))
            .collect();
        Agent {
            package,
            ks,
            intentions: Vec::new(),
            current: None,
            suspended: Vec::new(),
            subs,
            stale_requests: Vec::new(),
        }
    }

    pub fn package(&self) -> &MissionPackage {
        &self.package
    }

    pub fn beliefs(&self) -> &KnowledgeStore {
        &self.ks
    }

    pub fn intentions(&self) -> &[Intention] {
        &self.intentions
    }

    /// Plans the current beliefs admit, best first.
    pub fn applicable(&self) -> Vec<Candidate> {
        applicable_plans(&self.package, &self.ks)
    }

    /// True once every adopted intention has finished, with no further
    /// adoption possible — the mission has run out of things to do.
    pub fn is_idle(&self) -> bool {
        self.current.is_none() && self.suspended.is_empty() && self.best_adoptable().is_none()
    }

    /// One decision cycle; returns the commands emitted during it.
    pub fn bdi_step(&mut self, bus: &mut Bus, log: &mut MissionLog) -> Result<Vec<AtcCommand>, AtcError> {
        self.ks.advance_to(bus.tick())?;
        let drained: Vec<Envelope> = self.subs.iter().flat_map(|s| s.drain()).collect();
        for env in &drained {
            events::ingest(&mut self.ks, env)?;
        }
        self.poll_planner(bus, log)?;
        self.ks.infer(&self.package.rules)?;
        self.check_context(log)?;
        self.select(log)?;
        let mut emitted = Vec::new();
        if let Some(idx) = self.current {
            if self.intentions[idx].status == IntentionStatus::Active {
                self.execute_step(idx, bus, log, &mut emitted)?;
            }
        }
        Ok(emitted)
    }

    /// Claims the planning response owed to the parked intention, if it
    /// has arrived, and sweeps responses owed to dead intentions.
    fn poll_planner(&mut self, bus: &mut Bus, log: &mut MissionLog) -> Result<(), AtcError> {
        self.stale_requests
            .retain(|&corr| bus.poll_response(corr).is_none());
        let Some(idx) = self.current else {
            return Ok(());
        };
        let Some(WaitState::Planner { correlation }) = self.intentions[idx].wait else {
            return Ok(());
        };
        let Some(result) = bus.poll_response(correlation) else {
            return Ok(());
        };
        match result {
            Ok(value) => {
                let response: SolveResponse =
                    serde_json::from_value(value).map_err(|e| AtcError::Planner {
                        reason: format!("undecodable response: {e}"),
                    })?;
                bus.publish(
                    TOPIC_DP_SOLUTIONS,
                    SENDER,
                    serde_json::to_value(&response).expect("responses are plain data"),
                );
                match response.verdict {
                    SolveVerdict::Solved => {
                        self.record_solution(&response)?;
                        self.intentions[idx].status = IntentionStatus::Active;
                        self.intentions[idx].wait = None;
                        self.log_transition(log, idx, "resumed", None)?;
                        self.advance_pc(idx, log)?;
                    }
                    SolveVerdict::Unsolvable => {
                        self.fail_intention(idx, "planner found no solution", log)?;
                    }
                }
            }
            Err(e) => {
                self.fail_intention(idx, &format!("planning request failed: {e}"), log)?;
            }
        }
        Ok(())
    }

    /// Publishes a solved answer into the belief store: a readiness flag,
    /// the plan cost, and one waypoint fact per flight-plan entry. Beliefs
    /// accumulate across solves; the authoritative flight plan for flying
    /// travels on the solutions topic.
    fn record_solution(&mut self, response: &SolveResponse) -> Result<(), AtcError> {
        self.ks
            .assert_fact("dp-solution-ready", Vec::new(), Source::Planner);
        if let Some(cost) = response.cost {
            self.ks
                .assert_fact("dp-plan-cost", vec![Term::Int(cost as i64)], Source::Planner);
        }
        let georef = self
            .ks
            .map()
            .ok_or_else(|| AtcError::Planner {
                reason: "solution arrived with no grid installed".to_string(),
            })?
            .georef()
            .clone();
        for wp in &response.waypoints {
            let cell = position_to_cell(&wp.position, &georef).map_err(|e| AtcError::Planner {
                reason: format!("planned waypoint off the grid: {e}"),
            })?;
            self.ks.assert_fact(
                "dp-waypoint",
                vec![
                    Term::Int(wp.index as i64),
                    Term::Sym(cell.symbol()),
                    Term::Sym(events::waypoint_kind_symbol(wp.kind).to_string()),
                ],
                Source::Planner,
            );
        }
        Ok(())
    }

    /// Fails the running intention when its context no longer holds.
    /// Suspended intentions are checked lazily, when they come up for
    /// resumption — they are not executing in between.
    fn check_context(&mut self, log: &mut MissionLog) -> Result<(), AtcError> {
        let Some(idx) = self.current else {
            return Ok(());
        };
        let intention = &self.intentions[idx];
        let plan = &self.package.plans[intention.plan_index];
        if holds(&self.ks, &plan.context, &intention.bindings) {
            return Ok(());
        }
        self.fail_intention(idx, "context violated", log)
    }

    /// Fills the execution slot. With an active intention, only a strictly
    /// higher-utility adoptable plan may take over; with an empty slot,
    /// the best new plan competes against the suspension stack's top on
    /// the same terms — ties go to the already-started work.
    fn select(&mut self, log: &mut MissionLog) -> Result<(), AtcError> {
        if let Some(idx) = self.current {
            if self.intentions[idx].status == IntentionStatus::Waiting {
                // A parked planning exchange owns the slot until answered.
                return Ok(());
            }
            let running = self.package.plans[self.intentions[idx].plan_index].utility;
            if let Some((plan, binding)) = self.best_adoptable() {
                if self.package.plans[plan].utility > running {
                    self.intentions[idx].status = IntentionStatus::Waiting;
                    self.intentions[idx].wait = Some(WaitState::Preempted);
                    self.suspended.push(idx);
                    self.log_transition(log, idx, "suspended", None)?;
                    self.adopt(plan, binding, log)?;
                }
            }
            return Ok(());
        }

        // Clear suspensions whose context died while parked — they can
        // never legally resume.
        loop {
            let Some(&top) = self.suspended.last() else {
                break;
            };
            let intention = &self.intentions[top];
            let plan = &self.package.plans[intention.plan_index];
            if holds(&self.ks, &plan.context, &intention.bindings) {
                break;
            }
            self.suspended.pop();
            self.fail_intention(top, "context violated while suspended", log)?;
        }

        let resumable = self
            .suspended
            .last()
            .map(|&i| self.package.plans[self.intentions[i].plan_index].utility);
        let best = self.best_adoptable();
        let adopt_new = match (&best, resumable) {
            (Some((plan, _)), Some(resume_utility)) => {
                self.package.plans[*plan].utility > resume_utility
            }
            (Some(_), None) => true,
            (None, _) => false,
        };
        if adopt_new {
            let (plan, binding) = best.expect("checked above");
            self.adopt(plan, binding, log)?;
        } else if let Some(top) = self.suspended.pop() {
            self.intentions[top].status = IntentionStatus::Active;
            self.intentions[top].wait = None;
            self.current = Some(top);
            self.log_transition(log, top, "resumed", None)?;
        }
        Ok(())
    }

    /// Best adoptable plan: highest utility among plans whose goal label
    /// is unclaimed, whose precondition matches, and whose context holds
    /// under the matching bindings.
    fn best_adoptable(&self) -> Option<(usize, Binding)> {
        for cand in applicable_plans(&self.package, &self.ks) {
            let plan = &self.package.plans[cand.plan];
            if self.goal_claimed(&plan.goal) {
                continue;
            }
            for binding in &cand.bindings {
                if holds(&self.ks, &plan.context, binding) {
                    return Some((cand.plan, binding.clone()));
                }
            }
        }
        None
    }

    /// A goal label is single-attempt: any intention ever adopted for it,
    /// alive or dead, blocks another adoption.
    fn goal_claimed(&self, goal: &str) -> bool {
        self.intentions.iter().any(|i| i.goal == goal)
    }

    fn adopt(&mut self, plan_index: usize, bindings: Binding, log: &mut MissionLog) -> Result<(), AtcError> {
        let plan = &self.package.plans[plan_index];
        self.intentions
            .push(Intention::new(&plan.name, &plan.goal, bindings, plan_index));
        let idx = self.intentions.len() - 1;
        self.current = Some(idx);
        self.log_transition(log, idx, "adopted", None)
    }

    /// Runs the single body step at the intention's program counter.
    fn execute_step(
        &mut self,
        idx: usize,
        bus: &mut Bus,
        log: &mut MissionLog,
        emitted: &mut Vec<AtcCommand>,
    ) -> Result<(), AtcError> {
        let plan_index = self.intentions[idx].plan_index;
        let pc = self.intentions[idx].pc;
        let step = self.package.plans[plan_index].body[pc].clone();
        match step {
            PlanStep::EmitCommand { command } => {
                let Some((name, args)) = command.instantiate(&self.intentions[idx].bindings) else {
                    return self.fail_intention(idx, "command has unbound variables", log);
                };
                let payload = json!({
                    "plan": self.intentions[idx].plan,
                    "step": pc,
                    "command": name,
                    "args": args_json(&args),
                });
                log.append(self.ks.tick(), "atc-command", payload.clone())?;
                bus.publish(TOPIC_ATC_COMMANDS, SENDER, payload);
                emitted.push(AtcCommand {
                    plan: self.intentions[idx].plan.clone(),
                    step: pc,
                    name,
                    args,
                });
                self.advance_pc(idx, log)?;
            }
            PlanStep::KsAssert { fact } => {
                let Some((predicate, args)) = fact.instantiate(&self.intentions[idx].bindings)
                else {
                    return self.fail_intention(idx, "assertion has unbound variables", log);
                };
                self.ks.assert_fact(&predicate, args, Source::Planner);
                self.advance_pc(idx, log)?;
            }
            PlanStep::DpRequest => self.send_dp_request(idx, bus, log)?,
            PlanStep::WaitFor { pattern } => {
                let extended = self
                    .ks
                    .query(&pattern)
                    .iter()
                    .find_map(|f| pattern.unify(f, &self.intentions[idx].bindings));
                match extended {
                    Some(binding) => {
                        self.intentions[idx].bindings = binding;
                        self.advance_pc(idx, log)?;
                    }
                    // Not yet: stay active here and look again next cycle.
                    None => {}
                }
            }
        }
        Ok(())
    }

    /// Assembles a planning request from beliefs — the goal cell and
    /// re-entry altitude are expected on the status topic before any
    /// `dp-request` step runs — and parks the intention on its answer.
    fn send_dp_request(&mut self, idx: usize, bus: &mut Bus, log: &mut MissionLog) -> Result<(), AtcError> {
        let request = match self.build_solve_request() {
            Ok(r) => r,
            Err(reason) => return self.fail_intention(idx, &reason, log),
        };
        let payload = serde_json::to_value(&request).expect("solve requests are plain data");
        let correlation = bus.request(dynamic_planner::SERVICE, SENDER, payload, DP_TIMEOUT_TICKS);
        self.intentions[idx].status = IntentionStatus::Waiting;
        self.intentions[idx].wait = Some(WaitState::Planner { correlation });
        self.log_transition(log, idx, "waiting", None)
    }

    fn build_solve_request(&self) -> Result<SolveRequest, String> {
        let map = self.ks.map().ok_or("no survey grid installed")?;
        let goal_sym = self
            .latest_sym(GOAL_CELL_PRED)
            .ok_or_else(|| format!("no ({GOAL_CELL_PRED} ?cell) belief"))?;
        let final_cell = CellCoord::from_symbol(&goal_sym)
            .ok_or_else(|| format!("'{goal_sym}' is not a cell symbol"))?;
        let alt = self
            .latest_int(REENTRY_ALT_PRED)
            .ok_or_else(|| format!("no ({REENTRY_ALT_PRED} ?alt) belief"))?;
        let goal = GoalSpec::acquire_mapped(map, final_cell, alt as f64);
        Ok(SolveRequest::for_snapshot(self.ks.snapshot(), goal))
    }

    /// Newest value of a single-argument symbol belief; such beliefs
    /// accumulate and the highest revision wins.
    fn latest_sym(&self, predicate: &str) -> Option<String> {
        let pattern = Pattern::new(predicate, vec![PatTerm::Var("v".to_string())]);
        self.ks.query(&pattern).last().and_then(|f| match &f.args[0] {
            Term::Sym(s) => Some(s.clone()),
            Term::Int(_) => None,
        })
    }

    fn latest_int(&self, predicate: &str) -> Option<i64> {
        let pattern = Pattern::new(predicate, vec![PatTerm::Var("v".to_string())]);
        self.ks.query(&pattern).last().and_then(|f| match f.args[0] {
            Term::Int(i) => Some(i),
            Term::Sym(_) => None,
        })
    }

    /// Moves past the executed step; completing the body succeeds the
    /// intention and publishes its effects as durable beliefs.
    fn advance_pc(&mut self, idx: usize, log: &mut MissionLog) -> Result<(), AtcError> {
        self.intentions[idx].pc += 1;
        let plan_index = self.intentions[idx].plan_index;
        if self.intentions[idx].pc < self.package.plans[plan_index].body.len() {
            return Ok(());
        }
        for effect in self.package.plans[plan_index].effects.clone() {
            let Some((predicate, args)) = effect.instantiate(&self.intentions[idx].bindings) else {
                return self.fail_intention(idx, "effect has unbound variables", log);
            };
            self.ks.assert_fact(&predicate, args, Source::Planner);
        }
        self.intentions[idx].status = IntentionStatus::Succeeded;
        self.intentions[idx].wait = None;
        self.log_transition(log, idx, "succeeded", None)?;
        if self.current == Some(idx) {
            self.current = None;
        }
        Ok(())
    }

    /// Marks an intention failed, leaves a durable `(plan-failed NAME)`
    /// belief for other plans to react to, and releases whatever the
    /// intention held — the slot, a stack entry, a pending request.
    fn fail_intention(&mut self, idx: usize, reason: &str, log: &mut MissionLog) -> Result<(), AtcError> {
        if let Some(WaitState::Planner { correlation }) = self.intentions[idx].wait {
            self.stale_requests.push(correlation);
        }
        self.intentions[idx].status = IntentionStatus::Failed;
        self.intentions[idx].wait = None;
        let name = self.intentions[idx].plan.clone();
        self.ks
            .assert_fact("plan-failed", vec![Term::Sym(name)], Source::Planner);
        self.log_transition(log, idx, "failed", Some(reason))?;
        if self.current == Some(idx) {
            self.current = None;
        }
        self.suspended.retain(|&s| s != idx);
        Ok(())
    }

    fn log_transition(
        &self,
        log: &mut MissionLog,
        idx: usize,
        event: &str,
        reason: Option<&str>,
    ) -> Result<(), AtcError> {
        let intention = &self.intentions[idx];
        let mut payload = json!({
            "plan": intention.plan,
            "event": event,
            "pc": intention.pc,
        });
        if let Some(r) = reason {
            payload["reason"] = json!(r);
        }
        log.append(self.ks.tick(), "intention", payload)?;
        Ok(())
    }
}

/// Does every pattern match, consistently with the seed bindings?
fn holds(ks: &KnowledgeStore, patterns: &[Pattern], seed: &Binding) -> bool {
    let grounded: Vec<Pattern> = patterns.iter().map(|p| substitute(p, seed)).collect();
    !ks.match_all(&grounded).is_empty()
}

/// Rewrites the pattern's variables the seed binds to their values.
fn substitute(pattern: &Pattern, binding: &Binding) -> Pattern {
    let args = pattern
        .args
        .iter()
        .map(|a| match a {
            PatTerm::Var(v) => match binding.get(v) {
                Some(Term::Sym(s)) => PatTerm::Sym(s.clone()),
                Some(Term::Int(i)) => PatTerm::Int(*i),
                None => PatTerm::Var(v.clone()),
            },
            other => other.clone(),
        })
        .collect();
    Pattern::new(pattern.predicate.clone(), args)
}

fn args_json(args: &[Term]) -> Value {
    Value::Array(
        args.iter()
            .map(|t| match t {
                Term::Sym(s) => json!(s),
                Term::Int(i) => json!(i),
            })
            .collect(),
    )
}
