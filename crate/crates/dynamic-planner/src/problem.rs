//! Snapshot → problem instance: the bridge from the internal world picture
//! to solver input.

use geometry_world::{CellCoord, GridGeoref, Heading};
use knowledge::{KnowledgeSnapshot, Pattern};
use pddl_core::{print_problem, GroundAtom, Problem};

use crate::config::GoalSpec;
use crate::error::DpError;

/// Renders a problem instance from a knowledge snapshot: the UAV pose from
/// the latest telemetry facts, threat/target/scanned atoms from the
/// situational map, grid adjacency and turn tables from `georef`, and the
/// goal from `goal`. The text is a pure function of those inputs — equal
/// snapshots yield byte-identical problems.
///
/// The caller names the grid frame it intends to plan over; a snapshot
/// whose map is framed differently is rejected rather than silently
/// reinterpreted.
pub fn build_problem(
    snap: &KnowledgeSnapshot,
    goal: &GoalSpec,
    georef: &GridGeoref,
) -> Result<String, DpError> {
    let map = snap.map.as_ref().ok_or(DpError::IncompleteSnapshot {
        missing: "situational map",
    })?;
    if map.georef() != georef {
        return Err(DpError::GeorefMismatch);
    }

    let cell = latest_symbol(snap, "uav-cell")?;
    let cell = CellCoord::from_symbol(&cell).ok_or_else(|| DpError::BadTelemetry {
        predicate: "uav-cell",
        value: cell.clone(),
        expected: "grid cell",
    })?;
    in_grid(cell, georef)?;
    let heading = latest_symbol(snap, "uav-heading")?;
    let heading = Heading::from_symbol(&heading).ok_or_else(|| DpError::BadTelemetry {
        predicate: "uav-heading",
        value: heading.clone(),
        expected: "cardinal heading",
    })?;

    in_grid(goal.final_cell, georef)?;
    for &t in &goal.acquire {
        in_grid(t, georef)?;
    }

    let mut objects = Vec::new();
    for col in 0..georef.cols {
        for row in 0..georef.rows {
            objects.push(pddl_core::ast::TypedName {
                name: CellCoord::new(col, row).symbol(),
                ty: "cell".into(),
            });
        }
    }
    for d in Heading::ALL {
        objects.push(pddl_core::ast::TypedName {
            name: d.symbol().into(),
            ty: "direction".into(),
        });
    }

    let mut init = Vec::new();
    init.push(atom("at", vec![cell.symbol()]));
    init.push(atom("heading", vec![heading.symbol().into()]));
    for col in 0..georef.cols {
        for row in 0..georef.rows {
            let from = CellCoord::new(col, row);
            for d in Heading::ALL {
                if let Some(to) = step(from, d, georef) {
                    init.push(atom(
                        "adjacent",
                        vec![from.symbol(), to.symbol(), d.symbol().into()],
                    ));
                }
            }
        }
    }
    for d in Heading::ALL {
        init.push(atom(
            "left-of",
            vec![d.symbol().into(), d.turn(geometry_world::TurnDir::Left).symbol().into()],
        ));
    }
    for d in Heading::ALL {
        init.push(atom(
            "right-of",
            vec![d.symbol().into(), d.turn(geometry_world::TurnDir::Right).symbol().into()],
        ));
    }
    for c in map.threat_cells() {
        init.push(atom("threat", vec![c.symbol()]));
    }
    for c in map.target_cells() {
        init.push(atom("target", vec![c.symbol()]));
    }
    for c in map.scanned_cells() {
        init.push(atom("scanned", vec![c.symbol()]));
    }

    let mut goal_atoms = Vec::new();
    if !goal.acquire.is_empty() {
        goal_atoms.push(atom("acquired", vec![]));
    }
    goal_atoms.push(atom("at", vec![goal.final_cell.symbol()]));

    let problem = Problem {
        name: format!("survey-{}x{}", georef.cols, georef.rows),
        domain_name: "droneworld-scan".into(),
        objects,
        init,
        goal: goal_atoms,
    };
    Ok(print_problem(&problem))
}

/// The neighbor one step from `from` in direction `d`, if inside the grid.
fn step(from: CellCoord, d: Heading, georef: &GridGeoref) -> Option<CellCoord> {
    let (dc, dr) = d.delta();
    let col = from.col as i64 + dc;
    let row = from.row as i64 + dr;
    if col < 0 || row < 0 || col >= georef.cols as i64 || row >= georef.rows as i64 {
        return None;
    }
    Some(CellCoord::new(col as u32, row as u32))
}

fn atom(predicate: &str, args: Vec<String>) -> GroundAtom {
    GroundAtom::new(predicate, args)
}

fn in_grid(cell: CellCoord, georef: &GridGeoref) -> Result<(), DpError> {
    if cell.col >= georef.cols || cell.row >= georef.rows {
        return Err(DpError::Geo(geometry_world::GeoError::CellOutOfGrid {
            col: cell.col,
            row: cell.row,
            cols: georef.cols,
            rows: georef.rows,
        }));
    }
    Ok(())
}

/// The symbol argument of the highest-revision fact for a unary predicate.
/// Telemetry predicates accumulate one fact per observed value, so the most
/// recent assertion wins.
fn latest_symbol(snap: &KnowledgeSnapshot, predicate: &'static str) -> Result<String, DpError> {
    let pattern = Pattern::parse(&format!("({predicate} ?v)")).expect("fixed pattern parses");
    let fact = snap
        .query(&pattern)
        .into_iter()
        .max_by_key(|f| f.revision)
        .ok_or(DpError::IncompleteSnapshot { missing: predicate })?;
    match fact.args[0].as_sym() {
        Some(s) => Ok(s.to_string()),
        None => Err(DpError::BadTelemetry {
            predicate,
            value: fact.args[0].to_string(),
            expected: "symbol",
        }),
    }
}

#[cfg(test)]
mod tests {
    use geometry_world::Position;
    use knowledge::{KnowledgeStore, Source, Term};
    use pddl_core::{ground, parse_domain, parse_problem};

    use super::*;
    use crate::domain::domain_text;

    fn georef() -> GridGeoref {
        GridGeoref::new(Position::new(0.0, 0.0, 0.0).unwrap(), 600.0, 5, 5).unwrap()
    }

    fn store_at(cell: &str, heading: &str) -> KnowledgeStore {
        let mut ks = KnowledgeStore::new();
        ks.init_map(georef());
        ks.assert_fact("uav-cell", vec![Term::sym(cell)], Source::Sensor);
        ks.assert_fact("uav-heading", vec![Term::sym(heading)], Source::Sensor);
        ks
    }

    #[test]
    fn marker_atoms_mirror_the_map_exactly() {
        let mut ks = store_at("c0_0", "e");
        let map = ks.map_mut().unwrap();
        map.mark_threat(CellCoord::new(1, 3), 4).unwrap();
        map.mark_threat(CellCoord::new(2, 0), 5).unwrap();
        map.mark_target(CellCoord::new(3, 1), 6).unwrap();
        let goal = GoalSpec::acquire_mapped(ks.map().unwrap(), CellCoord::new(4, 4), 60.0);
        let text = build_problem(&ks.snapshot(), &goal, &georef()).unwrap();

        let threat_atoms = text.matches("(threat ").count();
        let target_atoms = text.matches("(target ").count();
        assert_eq!((threat_atoms, target_atoms), (2, 1));
        assert!(text.contains("(at c0_0)"));
        assert!(text.contains("(heading e)"));
        assert!(text.contains("(acquired)"));
    }

    #[test]
    fn empty_map_and_goal_at_current_cell_is_already_solved() {
        let ks = store_at("c2_3", "n");
        let goal = GoalSpec::transit(CellCoord::new(2, 3), 60.0);
        let text = build_problem(&ks.snapshot(), &goal, &georef()).unwrap();
        let d = parse_domain(domain_text()).unwrap();
        let task = ground(&d, &parse_problem(&text, &d).unwrap()).unwrap();
        assert!(task.is_goal(&task.init));
    }

    #[test]
    fn latest_telemetry_fact_wins() {
        let mut ks = store_at("c0_0", "e");
        ks.advance_to(9).unwrap();
        ks.assert_fact("uav-cell", vec![Term::sym("c1_0")], Source::Sensor);
        let goal = GoalSpec::transit(CellCoord::new(4, 4), 60.0);
        let text = build_problem(&ks.snapshot(), &goal, &georef()).unwrap();
        assert!(text.contains("(at c1_0)"));
        assert!(!text.contains("(at c0_0)"));
    }

    #[test]
    fn scanned_cells_carry_over_into_init() {
        let mut ks = store_at("c0_0", "e");
        ks.map_mut()
            .unwrap()
            .mark_scanned(CellCoord::new(2, 2), 3)
            .unwrap();
        let goal = GoalSpec::transit(CellCoord::new(4, 4), 60.0);
        let text = build_problem(&ks.snapshot(), &goal, &georef()).unwrap();
        assert!(text.contains("(scanned c2_2)"));
    }

    #[test]
    fn missing_pose_or_map_is_an_incomplete_snapshot() {
        let goal = GoalSpec::transit(CellCoord::new(0, 0), 60.0);
        let mut ks = KnowledgeStore::new();
        assert!(matches!(
            build_problem(&ks.snapshot(), &goal, &georef()),
            Err(DpError::IncompleteSnapshot { missing: "situational map" })
        ));
        ks.init_map(georef());
        assert!(matches!(
            build_problem(&ks.snapshot(), &goal, &georef()),
            Err(DpError::IncompleteSnapshot { missing: "uav-cell" })
        ));
        ks.assert_fact("uav-cell", vec![Term::sym("c0_0")], Source::Sensor);
        assert!(matches!(
            build_problem(&ks.snapshot(), &goal, &georef()),
            Err(DpError::IncompleteSnapshot { missing: "uav-heading" })
        ));
    }

    #[test]
    fn mismatched_grid_frames_are_rejected() {
        let ks = store_at("c0_0", "e");
        let other = GridGeoref::new(Position::new(50.0, 0.0, 0.0).unwrap(), 600.0, 5, 5).unwrap();
        let goal = GoalSpec::transit(CellCoord::new(4, 4), 60.0);
        assert!(matches!(
            build_problem(&ks.snapshot(), &goal, &other),
            Err(DpError::GeorefMismatch)
        ));
    }

    #[test]
    fn out_of_grid_goal_cells_are_rejected() {
        let ks = store_at("c0_0", "e");
        let goal = GoalSpec::transit(CellCoord::new(5, 0), 60.0);
        assert!(matches!(
            build_problem(&ks.snapshot(), &goal, &georef()),
            Err(DpError::Geo(_))
        ));
    }

    #[test]
    fn malformed_pose_symbols_are_named_in_the_error() {
        let mut ks = KnowledgeStore::new();
        ks.init_map(georef());
        ks.assert_fact("uav-cell", vec![Term::sym("nowhere")], Source::Sensor);
        ks.assert_fact("uav-heading", vec![Term::sym("n")], Source::Sensor);
        let goal = GoalSpec::transit(CellCoord::new(0, 0), 60.0);
        match build_problem(&ks.snapshot(), &goal, &georef()) {
            Err(DpError::BadTelemetry { predicate, value, .. }) => {
                assert_eq!(predicate, "uav-cell");
                assert_eq!(value, "nowhere");
            }
            other => panic!("expected bad telemetry, got {other:?}"),
        }
    }

    #[test]
    fn equal_snapshots_render_byte_identical_problems() {
        let build = || {
            let mut ks = store_at("c1_1", "n");
            let map = ks.map_mut().unwrap();
            map.mark_threat(CellCoord::new(2, 2), 4).unwrap();
            map.mark_target(CellCoord::new(3, 4), 5).unwrap();
            let goal = GoalSpec::acquire_mapped(ks.map().unwrap(), CellCoord::new(4, 0), 60.0);
            build_problem(&ks.snapshot(), &goal, &georef()).unwrap()
        };
        let a = build();
        let b = build();
        assert_eq!(a, b);
    }
}
