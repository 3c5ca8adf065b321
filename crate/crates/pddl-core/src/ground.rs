//! Grounding: exhaustive typed instantiation of action schemas against a
//! problem's objects, followed by static compilation and delete-relaxation
//! reachability pruning.
//!
//! A predicate is *static* when no action effect mentions it. Static
//! precondition literals (positive or negative) are evaluated against the
//! initial state while instantiating — failing instances are discarded, and
//! static facts are never carried in states. The surviving instances are then
//! pruned to those firable under delete relaxation (ignore deletes, saturate
//! adds): anything outside that fixpoint can never become applicable.
//!
//! The fact universe is the relaxed-reachable set plus any dynamic goal
//! atoms, indexed in sorted order so grounding is deterministic. States are
//! bitsets over that universe; `applicable` is subset testing and `apply` is
//! `(s \ delete-set) ∪ add-set`.

use std::collections::{BTreeSet, HashMap, HashSet};

use fixedbitset::FixedBitSet;

use crate::ast::{Domain, GroundAtom, Literal, Problem, Term};
use crate::GroundError;

/// A state: one bit per fact in the task's universe.
pub type State = FixedBitSet;

/// Default bound on the number of grounded actions before grounding aborts.
pub const DEFAULT_ACTION_CAP: usize = 1_000_000;

/// One fully instantiated action. Precondition/add/delete sets hold sorted,
/// deduplicated fact indices into the owning task's universe.
#[derive(Debug, Clone)]
pub struct GroundedAction {
    /// Schema name.
    pub name: String,
    /// Objects bound to the schema parameters, in declaration order.
    pub args: Vec<String>,
    pub cost: u32,
    pub pre: Vec<usize>,
    pub add: Vec<usize>,
    pub del: Vec<usize>,
    pre_set: FixedBitSet,
    add_set: FixedBitSet,
    del_set: FixedBitSet,
}

impl GroundedAction {
    /// Renders the conventional plan-step form, e.g. `(move-forward c0_0 c1_0 e)`.
    pub fn signature(&self) -> String {
        if self.args.is_empty() {
            format!("({})", self.name)
        } else {
            format!("({} {})", self.name, self.args.join(" "))
        }
    }

    /// True iff every precondition fact is present in `s`.
    pub fn applicable_in(&self, s: &State) -> bool {
        self.pre_set.is_subset(s)
    }
}

/// A domain/problem pair compiled to indexed facts and actions.
#[derive(Debug, Clone)]
pub struct GroundedTask {
    /// Fact universe, sorted by (predicate, args); position is the fact id.
    pub facts: Vec<GroundAtom>,
    /// Grounded actions, sorted by (name, args); position is the action id.
    pub actions: Vec<GroundedAction>,
    /// Initial state (dynamic init facts only; statics are compiled away).
    pub init: State,
    /// Dynamic goal fact ids, sorted. Statically true goal atoms are dropped
    /// as constants; a statically false one clears `relaxed_solvable`.
    pub goal: Vec<usize>,
    /// False when some goal atom is unreachable even ignoring deletes — the
    /// task is provably unsolvable.
    pub relaxed_solvable: bool,
    goal_set: FixedBitSet,
    fact_ids: HashMap<GroundAtom, usize>,
}

impl GroundedTask {
    pub fn num_facts(&self) -> usize {
        self.facts.len()
    }

    /// Id of a fact in the universe, if present.
    pub fn fact_id(&self, atom: &GroundAtom) -> Option<usize> {
        self.fact_ids.get(atom).copied()
    }

    /// Looks up an action id by schema name and argument tuple.
    pub fn find_action(&self, name: &str, args: &[&str]) -> Option<usize> {
        self.actions
            .iter()
            .position(|a| a.name == name && a.args.iter().map(String::as_str).eq(args.iter().copied()))
    }

    pub fn applicable(&self, s: &State, action: usize) -> bool {
        self.actions[action].applicable_in(s)
    }

    /// Progresses `s` through an action: `(s \ deletes) ∪ adds`, so an atom
    /// both deleted and added ends up present.
    ///
    /// # Panics
    /// Applying an inapplicable action is a contract violation and panics.
    pub fn apply(&self, s: &State, action: usize) -> State {
        let a = &self.actions[action];
        assert!(
            a.applicable_in(s),
            "apply contract violation: {} is not applicable",
            a.signature()
        );
        let mut next = s.clone();
        next.difference_with(&a.del_set);
        next.union_with(&a.add_set);
        next
    }

    pub fn is_goal(&self, s: &State) -> bool {
        self.goal_set.is_subset(s)
    }
}

/// Grounds with [`DEFAULT_ACTION_CAP`].
pub fn ground(d: &Domain, p: &Problem) -> Result<GroundedTask, GroundError> {
    ground_with_cap(d, p, DEFAULT_ACTION_CAP)
}

/// Grounds `p` against `d`, aborting once more than `cap` instances survive
/// static filtering.
pub fn ground_with_cap(d: &Domain, p: &Problem, cap: usize) -> Result<GroundedTask, GroundError> {
    if p.domain_name != d.name {
        return Err(GroundError::DomainMismatch {
            expected: d.name.clone(),
            found: p.domain_name.clone(),
        });
    }

    // Objects get dense ids so the static checks during enumeration hash
    // small integer tuples instead of strings.
    let mut object_id: HashMap<&str, u32> = HashMap::new();
    let mut objects: Vec<&str> = Vec::new();
    let mut by_type: HashMap<&str, Vec<u32>> = HashMap::new();
    for o in &p.objects {
        let id = *object_id.entry(o.name.as_str()).or_insert_with(|| {
            objects.push(o.name.as_str());
            objects.len() as u32 - 1
        });
        by_type.entry(o.ty.as_str()).or_default().push(id);
    }

    let statics = StaticIndex::build(
        p.init.iter().filter(|a| d.is_static(&a.predicate)),
        &object_id,
    );
    let dynamic_init: Vec<&GroundAtom> = p
        .init
        .iter()
        .filter(|a| !d.is_static(&a.predicate))
        .collect();

    let mut candidates: Vec<Candidate> = Vec::new();
    let mut scratch: Vec<u32> = Vec::new();
    for schema in &d.actions {
        let compiled = CompiledSchema::build(d, schema, &statics, &object_id)?;
        let mut binding: Vec<u32> = Vec::with_capacity(schema.params.len());
        enumerate(
            &compiled,
            &by_type,
            &objects,
            &mut binding,
            &mut scratch,
            &mut candidates,
            cap,
        )?;
    }

    // Delete-relaxation fixpoint: repeatedly fire any candidate whose
    // precondition is reached, saturating adds. Candidates never fired can
    // never become applicable and are dropped. Atoms are interned to dense
    // ids first, so each pass costs bit tests rather than atom hashing.
    let mut intern: HashMap<&GroundAtom, usize> = HashMap::new();
    let mut interned: Vec<&GroundAtom> = Vec::new();
    let init_interned: Vec<usize> = dynamic_init
        .iter()
        .map(|&a| intern_atom(&mut intern, &mut interned, a))
        .collect();
    let cand_pre: Vec<Vec<usize>> = candidates
        .iter()
        .map(|c| {
            c.pre
                .iter()
                .map(|a| intern_atom(&mut intern, &mut interned, a))
                .collect()
        })
        .collect();
    let cand_add: Vec<Vec<usize>> = candidates
        .iter()
        .map(|c| {
            c.add
                .iter()
                .map(|a| intern_atom(&mut intern, &mut interned, a))
                .collect()
        })
        .collect();
    let mut reached = FixedBitSet::with_capacity(interned.len());
    for &i in &init_interned {
        reached.insert(i);
    }
    let mut fired = vec![false; candidates.len()];
    loop {
        let mut changed = false;
        for i in 0..candidates.len() {
            if fired[i] || !cand_pre[i].iter().all(|&f| reached.contains(f)) {
                continue;
            }
            fired[i] = true;
            changed = true;
            for &f in &cand_add[i] {
                reached.insert(f);
            }
        }
        if !changed {
            break;
        }
    }

    // Split the goal: static atoms are constants, dynamic atoms join the
    // universe whether reachable or not.
    let mut goal_dynamic: BTreeSet<GroundAtom> = BTreeSet::new();
    let mut relaxed_solvable = true;
    for g in &p.goal {
        if d.is_static(&g.predicate) {
            if !statics.holds_atom(g, &object_id) {
                relaxed_solvable = false;
            }
        } else {
            if !intern.get(g).is_some_and(|&i| reached.contains(i)) {
                relaxed_solvable = false;
            }
            goal_dynamic.insert(g.clone());
        }
    }

    let mut universe: BTreeSet<GroundAtom> = interned
        .iter()
        .enumerate()
        .filter(|&(i, _)| reached.contains(i))
        .map(|(_, a)| (*a).clone())
        .collect();
    universe.extend(goal_dynamic.iter().cloned());

    let mut survivors: Vec<Candidate> = candidates
        .into_iter()
        .zip(fired)
        .filter_map(|(c, f)| f.then_some(c))
        .collect();
    survivors.sort_by(|a, b| (&a.name, &a.args).cmp(&(&b.name, &b.args)));
    let facts: Vec<GroundAtom> = universe.into_iter().collect();
    let fact_ids: HashMap<GroundAtom, usize> = facts
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), i))
        .collect();
    let n = facts.len();

    let index_set = |atoms: &[GroundAtom], keep_unknown: bool| -> Vec<usize> {
        let mut ids: Vec<usize> = atoms
            .iter()
            .filter_map(|a| {
                let id = fact_ids.get(a).copied();
                debug_assert!(
                    id.is_some() || keep_unknown,
                    "atom outside universe: {a}"
                );
                id
            })
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    };

    let actions: Vec<GroundedAction> = survivors
        .into_iter()
        .map(|c| {
            let pre = index_set(&c.pre, false);
            let add = index_set(&c.add, false);
            // A delete of a never-reachable fact can never fire; drop it.
            let del = index_set(&c.del, true);
            GroundedAction {
                pre_set: bitset(n, &pre),
                add_set: bitset(n, &add),
                del_set: bitset(n, &del),
                name: c.name,
                args: c.args,
                cost: c.cost,
                pre,
                add,
                del,
            }
        })
        .collect();

    let goal: Vec<usize> = goal_dynamic.iter().map(|a| fact_ids[a]).collect();
    let init_ids: Vec<usize> = dynamic_init.iter().map(|a| fact_ids[*a]).collect();

    Ok(GroundedTask {
        init: bitset(n, &init_ids),
        goal_set: bitset(n, &goal),
        facts,
        actions,
        goal,
        relaxed_solvable,
        fact_ids,
    })
}

/// Dense id for `atom`, assigning the next one on first sight.
fn intern_atom<'a>(
    intern: &mut HashMap<&'a GroundAtom, usize>,
    interned: &mut Vec<&'a GroundAtom>,
    atom: &'a GroundAtom,
) -> usize {
    *intern.entry(atom).or_insert_with(|| {
        interned.push(atom);
        interned.len() - 1
    })
}

fn bitset(n: usize, ids: &[usize]) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(n);
    for &i in ids {
        s.insert(i);
    }
    s
}

/// One instantiation that survived static filtering; atoms are the dynamic
/// precondition and the add/delete lists.
struct Candidate {
    name: String,
    args: Vec<String>,
    pre: Vec<GroundAtom>,
    add: Vec<GroundAtom>,
    del: Vec<GroundAtom>,
    cost: u32,
}

/// FNV-1a. The hot loop of enumeration probes sets of small integer tuples
/// millions of times on big grids; the default hasher's DoS resistance buys
/// nothing against our own dense object ids and costs several-fold there.
struct Fnv(u64);

impl Default for Fnv {
    fn default() -> Fnv {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
}

impl std::hash::Hasher for Fnv {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x100_0000_01b3);
        }
    }
}

type IntSet = HashSet<Vec<u32>, std::hash::BuildHasherDefault<Fnv>>;

/// The static slice of the initial state as object-id rows per predicate,
/// probed with borrowed integer slices so enumeration neither allocates nor
/// hashes strings.
struct StaticIndex<'a> {
    rows: HashMap<&'a str, IntSet>,
}

impl<'a> StaticIndex<'a> {
    fn build(
        atoms: impl Iterator<Item = &'a GroundAtom>,
        object_id: &HashMap<&str, u32>,
    ) -> StaticIndex<'a> {
        let mut rows: HashMap<&'a str, IntSet> = HashMap::new();
        for a in atoms {
            // The parser guarantees init atoms name declared objects only.
            let row: Option<Vec<u32>> = a
                .args
                .iter()
                .map(|s| object_id.get(s.as_str()).copied())
                .collect();
            if let Some(row) = row {
                rows.entry(a.predicate.as_str()).or_default().insert(row);
            }
        }
        StaticIndex { rows }
    }

    /// String-side probe for one-off checks (goal atoms).
    fn holds_atom(&self, atom: &GroundAtom, object_id: &HashMap<&str, u32>) -> bool {
        let key: Option<Vec<u32>> = atom
            .args
            .iter()
            .map(|s| object_id.get(s.as_str()).copied())
            .collect();
        match (self.rows.get(atom.predicate.as_str()), key) {
            (Some(rows), Some(key)) => rows.contains(&key),
            _ => false,
        }
    }
}

/// Atom template with parameter references resolved to positions. Kept in
/// string form: effect atoms may range over constants, and templates are
/// only instantiated once per surviving candidate.
struct AtomTpl<'a> {
    predicate: &'a str,
    args: Vec<ArgTpl<'a>>,
}

enum ArgTpl<'a> {
    Param(usize),
    Object(&'a str),
}

impl<'a> AtomTpl<'a> {
    fn build(schema: &'a crate::ast::ActionSchema, atom: &'a crate::ast::Atom) -> AtomTpl<'a> {
        let args = atom
            .terms
            .iter()
            .map(|t| match t {
                Term::Var(v) => ArgTpl::Param(param_index(schema, v)),
                Term::Const(c) => ArgTpl::Object(c.as_str()),
            })
            .collect();
        AtomTpl {
            predicate: atom.predicate.as_str(),
            args,
        }
    }

    fn instantiate(&self, binding: &[u32], objects: &[&str]) -> GroundAtom {
        GroundAtom {
            predicate: self.predicate.to_string(),
            args: self
                .args
                .iter()
                .map(|a| match a {
                    ArgTpl::Param(i) => objects[binding[*i] as usize].to_string(),
                    ArgTpl::Object(o) => (*o).to_string(),
                })
                .collect(),
        }
    }
}

fn param_index(schema: &crate::ast::ActionSchema, var: &str) -> usize {
    schema
        .params
        .iter()
        .position(|p| p.name == var)
        .expect("parser guarantees schema variables are bound")
}

/// One slot of a compiled static check: a binding position or a resolved
/// object id.
enum Slot {
    Param(usize),
    Const(u32),
}

/// A static precondition literal compiled for probing: argument slots plus
/// the row set of its predicate, resolved once at compile time.
struct StaticCheck<'s> {
    /// Binding depth at which every referenced parameter is bound.
    ready_at: usize,
    negated: bool,
    slots: Vec<Slot>,
    rows: Option<&'s IntSet>,
}

/// Prefix filter derived from a positive static literal: once `depth`
/// parameters are bound, the values read through `params` (in atom-argument
/// order) must match the corresponding projection of some static fact, or
/// no completion of the binding can ever satisfy the literal.
struct PartialFilter {
    depth: usize,
    params: Vec<usize>,
    rows: IntSet,
}

impl PartialFilter {
    /// Projection stages for a positive static check: one filter per
    /// intermediate depth at which another referenced parameter binds. The
    /// final depth is left to the exact check.
    fn stages(check: &StaticCheck<'_>) -> Vec<PartialFilter> {
        let mut depths: Vec<usize> = check
            .slots
            .iter()
            .filter_map(|s| match s {
                Slot::Param(i) => Some(i + 1),
                Slot::Const(_) => None,
            })
            .collect();
        depths.sort_unstable();
        depths.dedup();
        depths.pop();
        depths
            .into_iter()
            .map(|depth| {
                let mut positions = Vec::new();
                let mut params = Vec::new();
                for (pos, slot) in check.slots.iter().enumerate() {
                    if let Slot::Param(i) = slot {
                        if *i < depth {
                            positions.push(pos);
                            params.push(*i);
                        }
                    }
                }
                let mut rows = IntSet::default();
                for row in check.rows.into_iter().flatten() {
                    let constants_match = row.len() == check.slots.len()
                        && check.slots.iter().enumerate().all(|(pos, slot)| match slot {
                            Slot::Const(id) => row[pos] == *id,
                            Slot::Param(_) => true,
                        });
                    if constants_match {
                        rows.insert(positions.iter().map(|&p| row[p]).collect());
                    }
                }
                PartialFilter { depth, params, rows }
            })
            .collect()
    }
}

/// A schema split into a static-check schedule and dynamic precondition and
/// effect templates. Exact checks fire once fully bound; partial filters cut
/// statically impossible subtrees as each parameter binds; a schema no
/// binding can ever satisfy is `dead` and skipped outright.
struct CompiledSchema<'s> {
    schema: &'s crate::ast::ActionSchema,
    dead: bool,
    exact: Vec<StaticCheck<'s>>,
    partial: Vec<PartialFilter>,
    pre: Vec<AtomTpl<'s>>,
    add: Vec<AtomTpl<'s>>,
    del: Vec<AtomTpl<'s>>,
}

impl<'s> CompiledSchema<'s> {
    fn build(
        d: &Domain,
        schema: &'s crate::ast::ActionSchema,
        statics: &'s StaticIndex<'_>,
        object_id: &HashMap<&str, u32>,
    ) -> Result<CompiledSchema<'s>, GroundError> {
        let mut dead = false;
        let mut exact = Vec::new();
        let mut partial = Vec::new();
        let mut pre = Vec::new();
        for Literal { negated, atom } in &schema.precondition {
            if d.is_static(&atom.predicate) {
                let mut unknown_const = false;
                let slots: Vec<Slot> = atom
                    .terms
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) => Slot::Param(param_index(schema, v)),
                        Term::Const(c) => match object_id.get(c.as_str()) {
                            Some(&id) => Slot::Const(id),
                            None => {
                                unknown_const = true;
                                Slot::Const(u32::MAX)
                            }
                        },
                    })
                    .collect();
                let rows = statics.rows.get(atom.predicate.as_str());
                if *negated {
                    // An unknown constant or empty row set means the atom
                    // can never hold, so the negation is vacuously true.
                    if unknown_const || rows.is_none() {
                        continue;
                    }
                } else if unknown_const || rows.is_none() {
                    dead = true;
                    continue;
                }
                let ready_at = slots
                    .iter()
                    .filter_map(|s| match s {
                        Slot::Param(i) => Some(i + 1),
                        Slot::Const(_) => None,
                    })
                    .max()
                    .unwrap_or(0);
                let check = StaticCheck {
                    ready_at,
                    negated: *negated,
                    slots,
                    rows,
                };
                if !check.negated {
                    partial.extend(PartialFilter::stages(&check));
                }
                exact.push(check);
            } else if *negated {
                return Err(GroundError::NegatedDynamicPrecondition {
                    action: schema.name.clone(),
                    predicate: atom.predicate.clone(),
                });
            } else {
                pre.push(AtomTpl::build(schema, atom));
            }
        }
        let mut add = Vec::new();
        let mut del = Vec::new();
        for Literal { negated, atom } in &schema.effect {
            let tpl = AtomTpl::build(schema, atom);
            if *negated {
                del.push(tpl);
            } else {
                add.push(tpl);
            }
        }
        Ok(CompiledSchema {
            schema,
            dead,
            exact,
            partial,
            pre,
            add,
            del,
        })
    }
}

/// Depth-first binding enumeration. At each depth the partial filters
/// scheduled there run first, then every static literal that just became
/// fully bound is checked exactly, so statically impossible subtrees are cut
/// without expanding them. `scratch` is a reusable key buffer — the probes
/// allocate nothing per visit.
fn enumerate(
    c: &CompiledSchema<'_>,
    by_type: &HashMap<&str, Vec<u32>>,
    objects: &[&str],
    binding: &mut Vec<u32>,
    scratch: &mut Vec<u32>,
    out: &mut Vec<Candidate>,
    cap: usize,
) -> Result<(), GroundError> {
    if c.dead {
        return Ok(());
    }
    let depth = binding.len();
    for f in c.partial.iter().filter(|f| f.depth == depth) {
        scratch.clear();
        scratch.extend(f.params.iter().map(|&i| binding[i]));
        if !f.rows.contains(&scratch[..]) {
            return Ok(());
        }
    }
    for check in c.exact.iter().filter(|x| x.ready_at == depth) {
        scratch.clear();
        for slot in &check.slots {
            scratch.push(match slot {
                Slot::Param(i) => binding[*i],
                Slot::Const(id) => *id,
            });
        }
        let holds = check.rows.is_some_and(|rows| rows.contains(&scratch[..]));
        if holds == check.negated {
            return Ok(());
        }
    }
    if depth == c.schema.params.len() {
        if out.len() >= cap {
            return Err(GroundError::TooManyActions { cap });
        }
        out.push(Candidate {
            name: c.schema.name.clone(),
            args: binding.iter().map(|&i| objects[i as usize].to_string()).collect(),
            pre: c.pre.iter().map(|t| t.instantiate(binding, objects)).collect(),
            add: c.add.iter().map(|t| t.instantiate(binding, objects)).collect(),
            del: c.del.iter().map(|t| t.instantiate(binding, objects)).collect(),
            cost: c.schema.cost,
        });
        return Ok(());
    }
    let ty = c.schema.params[depth].ty.as_str();
    let Some(candidates) = by_type.get(ty) else {
        return Ok(()); // no objects of this type: zero instances
    };
    for &obj in candidates {
        binding.push(obj);
        let r = enumerate(c, by_type, objects, binding, scratch, out, cap);
        binding.pop();
        r?;
    }
    Ok(())
}
