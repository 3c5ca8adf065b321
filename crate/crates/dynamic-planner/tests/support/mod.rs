//! Shared fixtures for the integration suites: a self-contained flight-rules
//! oracle plus a builder that pushes synthetic missions through the real
//! snapshot → problem text → grounding pipeline.
//!
//! The oracle is written from scratch against the informal rules of the
//! survey world — integer grid math, fused turns, forward/left/right sector
//! scans, free acquisition after a scan — without touching the planner's
//! heading tables, problem generator, or search code. It enumerates the full
//! `(cell, heading, scanned, acquired)` space with a 0-1 breadth-first
//! search, so its answers are exhaustive: an optimal cost when the mission
//! is flyable, `None` when it provably is not. Both sides meeting on every
//! instance is the evidence that the production path encodes the rules it
//! claims to.

#![allow(dead_code)] // each test binary uses its own slice of this module

use std::collections::{HashMap, VecDeque};

use dynamic_planner::{build_problem, GoalSpec};
use geometry_world::{CellCoord, GridGeoref, Position};
use knowledge::{KnowledgeStore, Source, Term};
use pddl_core::{ground, parse_problem, Domain, GroundAtom, GroundedTask, State};

/// Direction symbols in the order the oracle numbers them.
pub const DIR_SYMBOLS: [&str; 4] = ["n", "e", "s", "w"];

/// Column/row displacement per direction index: north increases the row,
/// east increases the column.
const DELTA: [(i64, i64); 4] = [(0, 1), (1, 0), (0, -1), (-1, 0)];

/// 90° left turn per direction index: n→w, e→n, s→e, w→s.
const LEFT: [usize; 4] = [3, 0, 1, 2];

/// 90° right turn per direction index: n→e, e→s, s→w, w→n.
const RIGHT: [usize; 4] = [1, 2, 3, 0];

/// Oracle-side flight state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OracleState {
    pub col: i64,
    pub row: i64,
    /// Index into [`DIR_SYMBOLS`].
    pub dir: usize,
    /// Whether the instance's target sector has been scanned.
    pub scanned: bool,
    /// Whether the target has been acquired.
    pub acquired: bool,
}

/// One synthetic mission: a grid, a threat picture, at most one target, and
/// an exit cell. `need_acquire` decouples the objective from map clutter —
/// a target may sit on the map while the goal is pure transit.
#[derive(Debug, Clone)]
pub struct Instance {
    pub cols: i64,
    pub rows: i64,
    pub threats: Vec<(i64, i64)>,
    pub target: Option<(i64, i64)>,
    pub start: (i64, i64),
    /// Index into [`DIR_SYMBOLS`].
    pub start_dir: usize,
    pub final_cell: (i64, i64),
    pub need_acquire: bool,
}

impl Instance {
    pub fn start_state(&self) -> OracleState {
        OracleState {
            col: self.start.0,
            row: self.start.1,
            dir: self.start_dir,
            scanned: false,
            acquired: false,
        }
    }

    fn in_bounds(&self, cell: (i64, i64)) -> bool {
        (0..self.cols).contains(&cell.0) && (0..self.rows).contains(&cell.1)
    }

    fn is_threat(&self, cell: (i64, i64)) -> bool {
        self.threats.contains(&cell)
    }

    fn goal_met(&self, s: &OracleState) -> bool {
        (s.col, s.row) == self.final_cell && (!self.need_acquire || s.acquired)
    }

    /// `(cost, successor)` pairs under the flight rules: move one cell
    /// straight/left/right (never into a threat, cost 1), scan an adjacent
    /// sector without changing course (cost 0, only the target scan is
    /// tracked — other scans change nothing the goal can see), and acquire
    /// once the target is scanned (cost 0).
    fn transitions(&self, s: &OracleState) -> Vec<(u32, OracleState)> {
        let mut out = Vec::new();
        for dir in [s.dir, LEFT[s.dir], RIGHT[s.dir]] {
            let (dc, dr) = DELTA[dir];
            let ahead = (s.col + dc, s.row + dr);
            if !self.in_bounds(ahead) {
                continue;
            }
            if !self.is_threat(ahead) {
                out.push((
                    1,
                    OracleState {
                        col: ahead.0,
                        row: ahead.1,
                        dir,
                        ..*s
                    },
                ));
            }
            if self.target == Some(ahead) && !s.scanned {
                out.push((0, OracleState { scanned: true, ..*s }));
            }
        }
        if s.scanned && !s.acquired {
            out.push((0, OracleState { acquired: true, ..*s }));
        }
        out
    }

    /// Optimal goal cost from `from`, or `None` after exhausting the whole
    /// reachable space. 0-1 BFS: zero-cost successors go to the front of the
    /// deque, unit-cost ones to the back, so states pop in cost order.
    pub fn optimal_from(&self, from: OracleState) -> Option<u32> {
        let mut dist: HashMap<OracleState, u32> = HashMap::new();
        let mut queue: VecDeque<(OracleState, u32)> = VecDeque::new();
        dist.insert(from, 0);
        queue.push_back((from, 0));
        while let Some((s, d)) = queue.pop_front() {
            if dist[&s] < d {
                continue; // superseded entry
            }
            if self.goal_met(&s) {
                return Some(d);
            }
            for (step, next) in self.transitions(&s) {
                let nd = d + step;
                if dist.get(&next).is_none_or(|&old| nd < old) {
                    dist.insert(next, nd);
                    if step == 0 {
                        queue.push_front((next, nd));
                    } else {
                        queue.push_back((next, nd));
                    }
                }
            }
        }
        None
    }

    /// Optimal mission cost from the initial state.
    pub fn optimal(&self) -> Option<u32> {
        self.optimal_from(self.start_state())
    }
}

/// Runs `inst` through the production pipeline — knowledge store with map
/// markers and telemetry, snapshot, problem text, parse, ground — and
/// returns the grounded task plus the georeference used.
pub fn build_task(inst: &Instance, domain: &Domain) -> (GroundedTask, GridGeoref) {
    let georef = GridGeoref::new(
        Position::new(0.0, 0.0, 0.0).unwrap(),
        600.0,
        inst.cols as u32,
        inst.rows as u32,
    )
    .unwrap();
    let mut store = KnowledgeStore::new();
    store.init_map(georef.clone());
    store.assert_fact(
        "uav-cell",
        vec![Term::sym(cell_symbol(inst.start))],
        Source::Sensor,
    );
    store.assert_fact(
        "uav-heading",
        vec![Term::sym(DIR_SYMBOLS[inst.start_dir])],
        Source::Sensor,
    );
    let map = store.map_mut().unwrap();
    for &(col, row) in &inst.threats {
        map.mark_threat(CellCoord::new(col as u32, row as u32), 1).unwrap();
    }
    if let Some((col, row)) = inst.target {
        map.mark_target(CellCoord::new(col as u32, row as u32), 1).unwrap();
    }
    let goal = GoalSpec {
        acquire: match inst.target {
            Some((col, row)) if inst.need_acquire => {
                vec![CellCoord::new(col as u32, row as u32)]
            }
            _ => Vec::new(),
        },
        final_cell: CellCoord::new(inst.final_cell.0 as u32, inst.final_cell.1 as u32),
        reentry_alt: 60.0,
    };
    let text = build_problem(&store.snapshot(), &goal, &georef).expect("pipeline problem");
    let problem = parse_problem(&text, domain).expect("generated problem parses");
    let task = ground(domain, &problem).expect("generated problem grounds");
    (task, georef)
}

/// Reads a planner state back into oracle terms so the oracle can price it.
pub fn decode_state(task: &GroundedTask, s: &State, inst: &Instance) -> OracleState {
    let mut decoded = None;
    for col in 0..inst.cols {
        for row in 0..inst.rows {
            let atom = GroundAtom::new("at", vec![cell_symbol((col, row))]);
            if task.fact_id(&atom).is_some_and(|id| s.contains(id)) {
                decoded = Some((col, row));
            }
        }
    }
    let (col, row) = decoded.expect("state carries a position");
    let dir = (0..4)
        .find(|&d| {
            let atom = GroundAtom::new("heading", vec![DIR_SYMBOLS[d].to_string()]);
            task.fact_id(&atom).is_some_and(|id| s.contains(id))
        })
        .expect("state carries a heading");
    let scanned = inst.target.is_some_and(|t| {
        let atom = GroundAtom::new("scanned", vec![cell_symbol(t)]);
        task.fact_id(&atom).is_some_and(|id| s.contains(id))
    });
    let acquired = task
        .fact_id(&GroundAtom::new("acquired", Vec::new()))
        .is_some_and(|id| s.contains(id));
    OracleState { col, row, dir, scanned, acquired }
}

fn cell_symbol(cell: (i64, i64)) -> String {
    format!("c{}_{}", cell.0, cell.1)
}
