//! The knowledge store: assertion, pattern queries, forward chaining, and
//! immutable snapshots.

use std::collections::{HashMap, HashSet};

use geometry_world::{GridGeoref, SituationalMap};
use serde::{Deserialize, Serialize};

use crate::error::KsError;
use crate::fact::{Fact, Source, Term};
use crate::pattern::{Binding, Pattern};
use crate::rules::Rule;

/// Hard stop for forward-chaining rounds. Range-restricted positive rules
/// cannot invent constants, so real rule sets converge far earlier.
pub const INFER_ROUND_CAP: usize = 1000;

type Identity = (String, Vec<Term>);

/// Single-writer fact store with an optional situational map.
///
/// Facts live in assertion slots; queries return matches ordered by each
/// fact's current revision id, so iteration order is deterministic and
/// follows store history.
#[derive(Debug, Default)]
pub struct KnowledgeStore {
    /// Slot-addressed storage; retraction leaves a tombstone so indices in
    /// `by_pred`/`slots` stay valid.
    facts: Vec<Option<Fact>>,
    slots: HashMap<Identity, usize>,
    by_pred: HashMap<String, Vec<usize>>,
    next_revision: u64,
    tick: u64,
    map: Option<SituationalMap>,
}

impl KnowledgeStore {
    pub fn new() -> KnowledgeStore {
        KnowledgeStore::default()
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    /// Moves the store clock forward. The clock never regresses, which is
    /// what makes per-source fact ticks non-decreasing.
    pub fn advance_to(&mut self, tick: u64) -> Result<(), KsError> {
        if tick < self.tick {
            return Err(KsError::TickRegression {
                current: self.tick,
                requested: tick,
            });
        }
        self.tick = tick;
        Ok(())
    }

    /// Asserts a fact at the current tick, returning the revision id.
    ///
    /// Re-asserting an existing (predicate, args) pair keeps the single
    /// stored fact but refreshes its tick, source, and revision — the
    /// revision counter advances on every call.
    pub fn assert_fact(
        &mut self,
        predicate: impl Into<String>,
        args: Vec<Term>,
        source: Source,
    ) -> u64 {
        let predicate = predicate.into();
        self.next_revision += 1;
        let revision = self.next_revision;
        let identity = (predicate.clone(), args.clone());
        match self.slots.get(&identity) {
            Some(&slot) => {
                let f = self.facts[slot]
                    .as_mut()
                    .expect("live slots are indexed");
                f.tick = self.tick;
                f.source = source;
                f.revision = revision;
            }
            None => {
                let slot = self.facts.len();
                self.facts.push(Some(Fact {
                    predicate: predicate.clone(),
                    args,
                    tick: self.tick,
                    source,
                    revision,
                }));
                self.slots.insert(identity, slot);
                self.by_pred.entry(predicate).or_default().push(slot);
            }
        }
        revision
    }

    /// Retracts sensor facts matching `pattern`, returning how many were
    /// removed. Only sensor facts are eligible: reasoner facts are rebuilt
    /// by [`KnowledgeStore::infer`], and planner/package facts are treated
    /// as durable mission state.
    pub fn retract_sensor(&mut self, pattern: &Pattern) -> usize {
        let slots: Vec<usize> = self
            .matching_slots(pattern)
            .into_iter()
            .filter(|&s| self.facts[s].as_ref().is_some_and(|f| f.source == Source::Sensor))
            .collect();
        for slot in &slots {
            self.remove_slot(*slot);
        }
        slots.len()
    }

    fn remove_slot(&mut self, slot: usize) {
        if let Some(f) = self.facts[slot].take() {
            self.slots.remove(&(f.predicate.clone(), f.args.clone()));
            if let Some(v) = self.by_pred.get_mut(&f.predicate) {
                v.retain(|&s| s != slot);
            }
        }
    }

    fn matching_slots(&self, pattern: &Pattern) -> Vec<usize> {
        let Some(candidates) = self.by_pred.get(&pattern.predicate) else {
            return Vec::new();
        };
        candidates
            .iter()
            .copied()
            .filter(|&s| {
                self.facts[s]
                    .as_ref()
                    .is_some_and(|f| pattern.unify(f, &Binding::new()).is_some())
            })
            .collect()
    }

    /// All facts matching `pattern`, ordered by revision id. An unknown
    /// predicate yields an empty list, not an error.
    pub fn query(&self, pattern: &Pattern) -> Vec<&Fact> {
        let mut out: Vec<&Fact> = self
            .matching_slots(pattern)
            .into_iter()
            .filter_map(|s| self.facts[s].as_ref())
            .collect();
        out.sort_by_key(|f| f.revision);
        out
    }

    /// Joins a conjunction of patterns into the list of consistent variable
    /// bindings, in deterministic (revision-order) enumeration order.
    pub fn match_all(&self, patterns: &[Pattern]) -> Vec<Binding> {
        let mut bindings = vec![Binding::new()];
        for pattern in patterns {
            let facts = self.query(pattern);
            let mut next = Vec::new();
            for b in &bindings {
                for f in &facts {
                    if let Some(extended) = pattern.unify(f, b) {
                        next.push(extended);
                    }
                }
            }
            if next.is_empty() {
                return Vec::new();
            }
            bindings = next;
        }
        bindings
    }

    /// Recomputes derived knowledge: retracts every reasoner fact, then
    /// forward-chains `rules` to fixpoint (semi-naive — each round only
    /// joins against bindings touching the previous round's new facts).
    /// Returns the facts that were not in the store before the call.
    pub fn infer(&mut self, rules: &[Rule]) -> Result<Vec<Fact>, KsError> {
        let before: HashSet<Identity> = self
            .live_facts()
            .map(|f| (f.predicate.clone(), f.args.clone()))
            .collect();

        let reasoner_slots: Vec<usize> = self
            .facts
            .iter()
            .enumerate()
            .filter_map(|(s, f)| {
                f.as_ref()
                    .is_some_and(|f| f.source == Source::Reasoner)
                    .then_some(s)
            })
            .collect();
        for slot in reasoner_slots {
            self.remove_slot(slot);
        }

        // Seed delta with everything currently live.
        let mut delta: Vec<Fact> = self.live_facts().cloned().collect();
        let mut rounds = 0;
        while !delta.is_empty() {
            rounds += 1;
            if rounds > INFER_ROUND_CAP {
                return Err(KsError::DivergentRules {
                    cap: INFER_ROUND_CAP,
                });
            }
            let mut next_delta: Vec<Fact> = Vec::new();
            for rule in rules {
                for pinned in 0..rule.body.len() {
                    for binding in self.join_with_pinned(&rule.body, pinned, &delta) {
                        let (predicate, args) = rule
                            .head
                            .instantiate(&binding)
                            .expect("range restriction guarantees full bindings");
                        let identity = (predicate.clone(), args.clone());
                        if self.slots.contains_key(&identity) {
                            continue;
                        }
                        self.assert_fact(predicate, args, Source::Reasoner);
                        let slot = self.slots[&identity];
                        next_delta.push(self.facts[slot].clone().expect("just asserted"));
                    }
                }
            }
            delta = next_delta;
        }

        let mut derived: Vec<Fact> = self
            .live_facts()
            .filter(|f| !before.contains(&(f.predicate.clone(), f.args.clone())))
            .cloned()
            .collect();
        derived.sort_by_key(|f| f.revision);
        Ok(derived)
    }

    /// Conjunction join where body atom `pinned` must match a delta fact
    /// and the rest match the full store.
    fn join_with_pinned(&self, body: &[Pattern], pinned: usize, delta: &[Fact]) -> Vec<Binding> {
        let mut bindings = vec![Binding::new()];
        for (i, pattern) in body.iter().enumerate() {
            let mut next = Vec::new();
            if i == pinned {
                for b in &bindings {
                    for f in delta.iter().filter(|f| f.predicate == pattern.predicate) {
                        if let Some(extended) = pattern.unify(f, b) {
                            next.push(extended);
                        }
                    }
                }
            } else {
                let facts = self.query(pattern);
                for b in &bindings {
                    for f in &facts {
                        if let Some(extended) = pattern.unify(f, b) {
                            next.push(extended);
                        }
                    }
                }
            }
            if next.is_empty() {
                return Vec::new();
            }
            bindings = next;
        }
        bindings
    }

    fn live_facts(&self) -> impl Iterator<Item = &Fact> {
        self.facts.iter().filter_map(|f| f.as_ref())
    }

    /// All live facts in revision order.
    pub fn facts(&self) -> Vec<&Fact> {
        let mut out: Vec<&Fact> = self.live_facts().collect();
        out.sort_by_key(|f| f.revision);
        out
    }

    /// Installs the situational map's grid frame. The store owns the map;
    /// callers mutate it through [`KnowledgeStore::map_mut`].
    pub fn init_map(&mut self, georef: GridGeoref) {
        self.map = Some(SituationalMap::new(georef));
    }

    pub fn map(&self) -> Option<&SituationalMap> {
        self.map.as_ref()
    }

    pub fn map_mut(&mut self) -> Option<&mut SituationalMap> {
        self.map.as_mut()
    }

    /// Immutable copy of the store at the current tick.
    pub fn snapshot(&self) -> KnowledgeSnapshot {
        KnowledgeSnapshot {
            tick: self.tick,
            facts: self.facts().into_iter().cloned().collect(),
            map: self.map.clone(),
        }
    }

    /// Line-oriented debug dump: `tick predicate(args) source`, one live
    /// fact per line in revision order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for f in self.facts() {
            out.push_str(&format!("{} {} {}\n", f.tick, f, f.source));
        }
        out
    }
}

/// A frozen copy of the store: facts in revision order, the tick they were
/// frozen at, and the situational map as of that moment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeSnapshot {
    pub tick: u64,
    facts: Vec<Fact>,
    pub map: Option<SituationalMap>,
}

impl KnowledgeSnapshot {
    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    /// Matches like [`KnowledgeStore::query`], over the frozen facts.
    pub fn query(&self, pattern: &Pattern) -> Vec<&Fact> {
        self.facts
            .iter()
            .filter(|f| pattern.unify(f, &Binding::new()).is_some())
            .collect()
    }

    pub fn match_all(&self, patterns: &[Pattern]) -> Vec<Binding> {
        let mut bindings = vec![Binding::new()];
        for pattern in patterns {
            let mut next = Vec::new();
            for b in &bindings {
                for f in self.facts.iter().filter(|f| f.predicate == pattern.predicate) {
                    if let Some(extended) = pattern.unify(f, b) {
                        next.push(extended);
                    }
                }
            }
            if next.is_empty() {
                return Vec::new();
            }
            bindings = next;
        }
        bindings
    }
}
