//! Plan steps → flyable geometry.

use geometry_world::{cell_to_waypoint, CellCoord, GridGeoref, Waypoint, WaypointKind};
use pddl_core::{GroundedTask, Plan};
use serde::{Deserialize, Serialize};

use crate::error::DpError;

/// A gimbal pointing instruction riding alongside the waypoint stream:
/// cover `sector` after reaching waypoint `after` (`None` = before the
/// first leg, from wherever the plan starts).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct GimbalCommand {
    pub sector: CellCoord,
    pub after: Option<u32>,
}

/// The flyable form of a plan: one waypoint per move at the entered cell's
/// center, plus the sensor pointing schedule. Scans do not move the
/// vehicle, so they become gimbal commands, not waypoints.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FlightPlan {
    pub waypoints: Vec<Waypoint>,
    pub gimbal: Vec<GimbalCommand>,
}

/// Translates a plan into waypoints at `alt` over `georef`'s cell centers.
/// Every action that relocates the vehicle becomes one acquisition
/// waypoint; the last waypoint (the plan's endpoint) is marked as the goal.
pub fn plan_to_waypoints(
    plan: &Plan,
    task: &GroundedTask,
    georef: &GridGeoref,
    alt: f64,
) -> Result<FlightPlan, DpError> {
    let mut out = FlightPlan::default();
    for &id in &plan.actions {
        let action = &task.actions[id];
        let adds = |predicate: &str| {
            action
                .add
                .iter()
                .map(|&f| &task.facts[f])
                .find(|f| f.predicate == predicate)
        };
        if let Some(occupancy) = adds("at") {
            let cell = decode_cell(&occupancy.args, task, id)?;
            let index = out.waypoints.len() as u32;
            out.waypoints.push(cell_to_waypoint(
                cell,
                georef,
                WaypointKind::Acquisition,
                alt,
                index,
            )?);
        } else if let Some(coverage) = adds("scanned") {
            let sector = decode_cell(&coverage.args, task, id)?;
            out.gimbal.push(GimbalCommand {
                sector,
                after: (out.waypoints.len() as u32).checked_sub(1),
            });
        }
        // Anything else (acquisition bookkeeping) has no flight geometry.
    }
    if let Some(last) = out.waypoints.last_mut() {
        last.kind = WaypointKind::Goal;
    }
    Ok(out)
}

fn decode_cell(args: &[String], task: &GroundedTask, action: usize) -> Result<CellCoord, DpError> {
    args.first()
        .and_then(|a| CellCoord::from_symbol(a))
        .ok_or_else(|| DpError::MalformedAction {
            signature: task.actions[action].signature(),
        })
}

#[cfg(test)]
mod tests {
    use geometry_world::{GridGeoref, Position};
    use knowledge::{KnowledgeStore, Source, Term};
    use pddl_core::{ground, parse_domain, parse_plan, parse_problem};

    use super::*;
    use crate::config::GoalSpec;
    use crate::domain::domain_text;
    use crate::problem::build_problem;

    fn georef() -> GridGeoref {
        GridGeoref::new(Position::new(0.0, 0.0, 0.0).unwrap(), 600.0, 5, 5).unwrap()
    }

    fn task_from(start_cell: &str, start_heading: &str, goal: &GoalSpec) -> GroundedTask {
        let mut ks = KnowledgeStore::new();
        ks.init_map(georef());
        ks.assert_fact("uav-cell", vec![Term::sym(start_cell)], Source::Sensor);
        ks.assert_fact("uav-heading", vec![Term::sym(start_heading)], Source::Sensor);
        if !goal.acquire.is_empty() {
            let map = ks.map_mut().unwrap();
            for &t in &goal.acquire {
                map.mark_target(t, 1).unwrap();
            }
        }
        let text = build_problem(&ks.snapshot(), goal, &georef()).unwrap();
        let d = parse_domain(domain_text()).unwrap();
        ground(&d, &parse_problem(&text, &d).unwrap()).unwrap()
    }

    #[test]
    fn empty_plans_translate_to_empty_flight_plans() {
        let task = task_from("c0_0", "n", &GoalSpec::transit(CellCoord::new(0, 0), 60.0));
        let plan = Plan::new(vec![], &task);
        let fp = plan_to_waypoints(&plan, &task, &georef(), 60.0).unwrap();
        assert!(fp.waypoints.is_empty() && fp.gimbal.is_empty());
    }

    #[test]
    fn forward_moves_trace_the_entered_cell_centers() {
        let task = task_from("c0_0", "n", &GoalSpec::transit(CellCoord::new(0, 3), 60.0));
        let plan = parse_plan(
            "(move-forward c0_0 c0_1 n)\n(move-forward c0_1 c0_2 n)\n(move-forward c0_2 c0_3 n)",
            &task,
        )
        .unwrap();
        let fp = plan_to_waypoints(&plan, &task, &georef(), 60.0).unwrap();
        let cells: Vec<(f64, f64)> = fp
            .waypoints
            .iter()
            .map(|w| (w.position.x, w.position.y))
            .collect();
        // Cell centers of (0,1), (0,2), (0,3) on the 600 m grid.
        assert_eq!(cells, vec![(0.0, 600.0), (0.0, 1200.0), (0.0, 1800.0)]);
        assert!(fp.waypoints.iter().all(|w| w.position.alt == 60.0));
        assert_eq!(
            fp.waypoints.iter().map(|w| w.index).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
        // Intermediate legs are acquisition waypoints; the endpoint is the
        // goal.
        assert_eq!(fp.waypoints[0].kind, WaypointKind::Acquisition);
        assert_eq!(fp.waypoints[1].kind, WaypointKind::Acquisition);
        assert_eq!(fp.waypoints[2].kind, WaypointKind::Goal);
    }

    #[test]
    fn scans_become_gimbal_commands_anchored_to_the_previous_waypoint() {
        let goal = GoalSpec {
            acquire: vec![CellCoord::new(0, 2)],
            final_cell: CellCoord::new(0, 1),
            reentry_alt: 60.0,
        };
        let task = task_from("c0_0", "n", &goal);
        let plan = parse_plan(
            "(scan-forward c0_0 c0_1 n)\n(move-forward c0_0 c0_1 n)\n(scan-forward c0_1 c0_2 n)\n(acquire c0_2)",
            &task,
        )
        .unwrap();
        let fp = plan_to_waypoints(&plan, &task, &georef(), 60.0).unwrap();
        assert_eq!(fp.waypoints.len(), 1);
        assert_eq!(fp.waypoints[0].kind, WaypointKind::Goal);
        assert_eq!(
            fp.gimbal,
            vec![
                GimbalCommand {
                    sector: CellCoord::new(0, 1),
                    after: None
                },
                GimbalCommand {
                    sector: CellCoord::new(0, 2),
                    after: Some(0)
                },
            ]
        );
    }
}
