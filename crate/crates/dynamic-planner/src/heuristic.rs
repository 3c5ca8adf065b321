//! Admissible distance guidance for survey tasks.

use geometry_world::CellCoord;
use pddl_core::{GroundedTask, State};

/// One goal atom's shape, as far as the estimator understands it.
enum GoalShape {
    /// `(at c)` — costs at least the grid distance to `c`.
    At(CellCoord),
    /// `(scanned c)` — costs at least the moves to a cell adjacent to `c`.
    Near(CellCoord),
    /// `(acquired)` — costs at least the cheapest way to enable one of its
    /// achieving actions: 0 if some achiever's scan precondition already
    /// holds, otherwise the moves to get adjacent to the nearest target.
    /// Achievers are `(scanned-precondition fact id, target cell)` pairs.
    AcquireAny(Vec<(usize, CellCoord)>),
    /// Anything else — contributes nothing (the estimator must stay a
    /// lower bound on tasks it does not understand).
    Opaque,
}

/// Lower bound on remaining plan cost: the maximum over unachieved goal
/// atoms of the grid (Manhattan) distance each one still demands, ignoring
/// threats and turn feasibility. Since every move costs 1 and crosses one
/// cell edge, the bound is admissible; scans and acquisition only discharge
/// atoms whose distance demand is already zero, which keeps it consistent.
///
/// On tasks that do not decode as a survey (no occupancy facts, foreign
/// goal predicates) the estimate degrades to 0 and search falls back to
/// uniform-cost behavior.
pub struct SurveyEstimator {
    /// `(fact id, cell)` for every occupancy fact in the universe.
    at_facts: Vec<(usize, CellCoord)>,
    /// `(goal fact id, shape)` per goal atom.
    goals: Vec<(usize, GoalShape)>,
}

impl SurveyEstimator {
    pub fn for_task(task: &GroundedTask) -> SurveyEstimator {
        let cell_arg = |args: &[String]| -> Option<CellCoord> {
            match args {
                [only] => CellCoord::from_symbol(only),
                _ => None,
            }
        };
        let at_facts = task
            .facts
            .iter()
            .enumerate()
            .filter(|(_, f)| f.predicate == "at")
            .filter_map(|(id, f)| cell_arg(&f.args).map(|c| (id, c)))
            .collect();
        let goals = task
            .goal
            .iter()
            .map(|&g| {
                let f = &task.facts[g];
                let shape = match f.predicate.as_str() {
                    "at" => cell_arg(&f.args).map_or(GoalShape::Opaque, GoalShape::At),
                    "scanned" => cell_arg(&f.args).map_or(GoalShape::Opaque, GoalShape::Near),
                    "acquired" if f.args.is_empty() => {
                        let mut achievers = Vec::new();
                        for a in &task.actions {
                            if !a.add.contains(&g) {
                                continue;
                            }
                            for &p in &a.pre {
                                let pf = &task.facts[p];
                                if pf.predicate == "scanned" {
                                    if let Some(c) = cell_arg(&pf.args) {
                                        achievers.push((p, c));
                                    }
                                }
                            }
                        }
                        GoalShape::AcquireAny(achievers)
                    }
                    _ => GoalShape::Opaque,
                };
                (g, shape)
            })
            .collect();
        SurveyEstimator { at_facts, goals }
    }

    /// The cost lower bound for `s`; 0 whenever the goal is satisfied.
    pub fn estimate(&self, s: &State) -> u32 {
        let Some(here) = self
            .at_facts
            .iter()
            .find(|(id, _)| s.contains(*id))
            .map(|&(_, c)| c)
        else {
            return 0;
        };
        let mut bound = 0;
        for (goal_fact, shape) in &self.goals {
            if s.contains(*goal_fact) {
                continue;
            }
            let demand = match shape {
                GoalShape::At(c) => here.manhattan(c),
                GoalShape::Near(c) => here.manhattan(c).saturating_sub(1),
                GoalShape::AcquireAny(achievers) => achievers
                    .iter()
                    .map(|&(scanned, c)| {
                        if s.contains(scanned) {
                            0
                        } else {
                            here.manhattan(&c).saturating_sub(1)
                        }
                    })
                    .min()
                    .unwrap_or(0),
                GoalShape::Opaque => 0,
            };
            bound = bound.max(demand);
        }
        bound
    }
}

#[cfg(test)]
mod tests {
    use geometry_world::{GridGeoref, Position};
    use knowledge::{KnowledgeStore, Source, Term};
    use pddl_core::{ground, parse_domain, parse_problem, GroundAtom};

    use super::*;
    use crate::config::GoalSpec;
    use crate::domain::domain_text;
    use crate::problem::build_problem;

    fn task_for(goal: &GoalSpec, prep: impl FnOnce(&mut KnowledgeStore)) -> GroundedTask {
        let georef = GridGeoref::new(Position::new(0.0, 0.0, 0.0).unwrap(), 600.0, 5, 5).unwrap();
        let mut ks = KnowledgeStore::new();
        ks.init_map(georef.clone());
        ks.assert_fact("uav-cell", vec![Term::sym("c0_0")], Source::Sensor);
        ks.assert_fact("uav-heading", vec![Term::sym("e")], Source::Sensor);
        prep(&mut ks);
        let text = build_problem(&ks.snapshot(), goal, &georef).unwrap();
        let d = parse_domain(domain_text()).unwrap();
        ground(&d, &parse_problem(&text, &d).unwrap()).unwrap()
    }

    #[test]
    fn satisfied_goal_estimates_zero() {
        let task = task_for(&GoalSpec::transit(CellCoord::new(0, 0), 60.0), |_| {});
        let est = SurveyEstimator::for_task(&task);
        assert!(task.is_goal(&task.init));
        assert_eq!(est.estimate(&task.init), 0);
    }

    #[test]
    fn transit_goal_estimates_grid_distance() {
        let task = task_for(&GoalSpec::transit(CellCoord::new(4, 4), 60.0), |_| {});
        let est = SurveyEstimator::for_task(&task);
        assert_eq!(est.estimate(&task.init), 8);
    }

    #[test]
    fn acquisition_demands_adjacency_until_scanned() {
        let goal = GoalSpec {
            acquire: vec![CellCoord::new(4, 4)],
            final_cell: CellCoord::new(0, 0),
            reentry_alt: 60.0,
        };
        let task = task_for(&goal, |ks| {
            ks.map_mut()
                .unwrap()
                .mark_target(CellCoord::new(4, 4), 1)
                .unwrap();
        });
        let est = SurveyEstimator::for_task(&task);
        // From (0,0): seven moves to stand next to (4,4); the exit-cell atom
        // is already satisfied, so it demands nothing.
        assert_eq!(est.estimate(&task.init), 7);

        // Once the target is scanned, acquisition is free wherever we are.
        let mut scanned = task.init.clone();
        let id = task
            .fact_id(&GroundAtom::new("scanned", vec!["c4_4".into()]))
            .unwrap();
        scanned.insert(id);
        assert_eq!(est.estimate(&scanned), 0);
    }

    #[test]
    fn foreign_tasks_degrade_to_zero() {
        let src = "(define (domain bare)\n  (:predicates (done))\n  (:action finish :parameters () :precondition () :effect (done))\n)";
        let d = parse_domain(src).unwrap();
        let p = parse_problem(
            "(define (problem b1) (:domain bare) (:init) (:goal (done)))",
            &d,
        )
        .unwrap();
        let task = ground(&d, &p).unwrap();
        let est = SurveyEstimator::for_task(&task);
        assert_eq!(est.estimate(&task.init), 0);
    }
}
