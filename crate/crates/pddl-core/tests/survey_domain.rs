//! Behavior of parsing and grounding on the shipped grid-survey domain.
//!
//! Expected instantiation counts come from an independent brute-force
//! enumeration of in-bounds (cell, direction) pairs, not from the grounder.

use pddl_core::{
    ground, parse_domain, parse_problem, print_domain, GroundAtom, GroundedTask,
    DEFAULT_ACTION_CAP,
};

const DOMAIN_SRC: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../dynamic-planner/assets/droneworld-scan.pddl"
));

/// Emits a problem over a `cols`×`rows` grid: full adjacency, the standard
/// turn tables, a start pose, and threat/target markings.
fn grid_problem(
    cols: u32,
    rows: u32,
    start: (u32, u32),
    heading: &str,
    threats: &[(u32, u32)],
    targets: &[(u32, u32)],
    goal: &str,
) -> String {
    use std::fmt::Write;
    let cell = |c: u32, r: u32| format!("c{c}_{r}");
    let mut s = String::new();
    let _ = writeln!(s, "(define (problem grid-test)");
    let _ = writeln!(s, "  (:domain droneworld-scan)");
    let _ = writeln!(s, "  (:objects");
    let mut cells = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            cells.push(cell(c, r));
        }
    }
    let _ = writeln!(s, "    {} - cell", cells.join(" "));
    let _ = writeln!(s, "    n e s w - direction");
    let _ = writeln!(s, "  )");
    let _ = writeln!(s, "  (:init");
    let _ = writeln!(s, "    (at {})", cell(start.0, start.1));
    let _ = writeln!(s, "    (heading {heading})");
    for r in 0..rows {
        for c in 0..cols {
            if r + 1 < rows {
                let _ = writeln!(s, "    (adjacent {} {} n)", cell(c, r), cell(c, r + 1));
            }
            if c + 1 < cols {
                let _ = writeln!(s, "    (adjacent {} {} e)", cell(c, r), cell(c + 1, r));
            }
            if r > 0 {
                let _ = writeln!(s, "    (adjacent {} {} s)", cell(c, r), cell(c, r - 1));
            }
            if c > 0 {
                let _ = writeln!(s, "    (adjacent {} {} w)", cell(c, r), cell(c - 1, r));
            }
        }
    }
    for line in [
        "(left-of n w)",
        "(left-of e n)",
        "(left-of s e)",
        "(left-of w s)",
        "(right-of n e)",
        "(right-of e s)",
        "(right-of s w)",
        "(right-of w n)",
    ] {
        let _ = writeln!(s, "    {line}");
    }
    for &(c, r) in threats {
        let _ = writeln!(s, "    (threat {})", cell(c, r));
    }
    for &(c, r) in targets {
        let _ = writeln!(s, "    (target {})", cell(c, r));
    }
    let _ = writeln!(s, "  )");
    let _ = writeln!(s, "  (:goal {goal})");
    let _ = writeln!(s, ")");
    s
}

fn ground_grid(
    cols: u32,
    rows: u32,
    start: (u32, u32),
    heading: &str,
    threats: &[(u32, u32)],
    targets: &[(u32, u32)],
    goal: &str,
) -> GroundedTask {
    let d = parse_domain(DOMAIN_SRC).unwrap();
    let p = parse_problem(
        &grid_problem(cols, rows, start, heading, threats, targets, goal),
        &d,
    )
    .unwrap();
    ground(&d, &p).unwrap()
}

/// Brute-force count of (cell, direction) pairs whose forward cell is
/// in bounds — the expected number of forward-move instantiations on a
/// threat-free grid.
fn forward_pair_count(cols: u32, rows: u32) -> usize {
    let mut n = 0;
    for c in 0..cols {
        for r in 0..rows {
            n += usize::from(r + 1 < rows); // n
            n += usize::from(c + 1 < cols); // e
            n += usize::from(r > 0); // s
            n += usize::from(c > 0); // w
        }
    }
    n
}

fn count_named(t: &GroundedTask, name: &str) -> usize {
    t.actions.iter().filter(|a| a.name == name).count()
}

#[test]
fn shipped_domain_declares_the_seven_motion_and_sensor_actions() {
    let d = parse_domain(DOMAIN_SRC).unwrap();
    let mut names: Vec<&str> = d.actions.iter().map(|a| a.name.as_str()).collect();
    names.sort_unstable();
    assert_eq!(
        names,
        vec![
            "acquire",
            "move-forward",
            "move-left",
            "move-right",
            "scan-forward",
            "scan-left",
            "scan-right",
        ]
    );
}

#[test]
fn shipped_domain_survives_a_canonical_print_cycle() {
    let d = parse_domain(DOMAIN_SRC).unwrap();
    let printed = print_domain(&d);
    let d2 = parse_domain(&printed).unwrap();
    assert_eq!(d, d2);
    assert_eq!(printed, print_domain(&d2));
}

#[test]
fn five_by_five_problem_declares_25_cell_objects() {
    let d = parse_domain(DOMAIN_SRC).unwrap();
    let p = parse_problem(
        &grid_problem(5, 5, (0, 0), "e", &[], &[(4, 4)], "(acquired)"),
        &d,
    )
    .unwrap();
    assert_eq!(p.objects.iter().filter(|o| o.ty == "cell").count(), 25);
}

#[test]
fn threat_free_5x5_grounds_one_forward_move_per_inbounds_pair() {
    let t = ground_grid(5, 5, (0, 0), "e", &[], &[(4, 4)], "(acquired)");
    let expected = forward_pair_count(5, 5);
    assert_eq!(expected, 80);
    assert_eq!(count_named(&t, "move-forward"), expected);
    // Turns and scans range over the same adjacency relation, one turned
    // direction each, so they instantiate to the same count.
    assert_eq!(count_named(&t, "move-left"), expected);
    assert_eq!(count_named(&t, "move-right"), expected);
    assert_eq!(count_named(&t, "scan-forward"), expected);
    assert_eq!(count_named(&t, "scan-left"), expected);
    assert_eq!(count_named(&t, "scan-right"), expected);
    assert_eq!(count_named(&t, "acquire"), 1);
    assert_eq!(t.actions.len(), 6 * expected + 1);
    assert!(t.relaxed_solvable);
}

#[test]
fn single_cell_grid_prunes_every_action() {
    let t = ground_grid(1, 1, (0, 0), "e", &[], &[(0, 0)], "(acquired)");
    // No adjacency: moves and scans are statically impossible, so nothing
    // ever marks the target scanned and `acquire` is unreachable too.
    assert!(t.actions.is_empty());
    assert!(!t.relaxed_solvable);
}

#[test]
fn threat_cells_lose_their_incoming_moves() {
    let t = ground_grid(3, 3, (0, 0), "e", &[(1, 1)], &[(2, 2)], "(acquired)");
    assert!(t
        .actions
        .iter()
        .filter(|a| a.name.starts_with("move-"))
        .all(|a| a.args[1] != "c1_1"));
    // Scans of the threat cell are still legal — sensing is not motion.
    assert!(t
        .actions
        .iter()
        .any(|a| a.name == "scan-forward" && a.args[1] == "c1_1"));
}

#[test]
fn forward_move_swaps_the_position_atom() {
    let t = ground_grid(5, 5, (2, 2), "n", &[], &[(4, 4)], "(at c2_4)");
    let idx = t.find_action("move-forward", &["c2_2", "c2_3", "n"]).unwrap();
    let next = t.apply(&t.init, idx);
    let at = |cell: &str| GroundAtom {
        predicate: "at".into(),
        args: vec![cell.into()],
    };
    assert!(next.contains(t.fact_id(&at("c2_3")).unwrap()));
    assert!(!next.contains(t.fact_id(&at("c2_2")).unwrap()));
    // Heading is untouched by a forward move.
    let heading_n = GroundAtom {
        predicate: "heading".into(),
        args: vec!["n".into()],
    };
    assert!(next.contains(t.fact_id(&heading_n).unwrap()));
}

#[test]
fn twenty_by_twenty_grounds_under_the_default_cap() {
    let t = ground_grid(20, 20, (0, 0), "e", &[], &[(19, 19)], "(acquired)");
    assert_eq!(count_named(&t, "move-forward"), forward_pair_count(20, 20));
    assert!(t.actions.len() <= DEFAULT_ACTION_CAP);
    assert!(t.relaxed_solvable);
}
