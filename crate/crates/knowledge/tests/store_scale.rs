//! Scale and serialization behavior of the store.

use std::time::Instant;

use knowledge::{KnowledgeSnapshot, KnowledgeStore, PatTerm, Pattern, Source, Term};

#[test]
fn ten_thousand_asserts_yield_dense_revisions_and_bounded_queries() {
    let mut ks = KnowledgeStore::new();
    let mut revisions = Vec::with_capacity(10_000);
    for i in 0..10_000i64 {
        revisions.push(ks.assert_fact("bulk", vec![Term::Int(i)], Source::Sensor));
    }
    // Dense: exactly 1..=10000 with no gaps.
    assert_eq!(revisions.first(), Some(&1));
    assert_eq!(revisions.last(), Some(&10_000));
    assert!(revisions.windows(2).all(|w| w[1] == w[0] + 1));

    let start = Instant::now();
    let one = ks.query(&Pattern::new("bulk", vec![PatTerm::Int(5_000)]));
    let all = ks.query(&Pattern::new("bulk", vec![PatTerm::var("i")]));
    let elapsed = start.elapsed();
    assert_eq!(one.len(), 1);
    assert_eq!(all.len(), 10_000);
    // Indexed lookup plus one full scan over 10k facts; a generous bound
    // that still catches accidental quadratic behavior.
    assert!(elapsed.as_millis() < 500, "queries took {elapsed:?}");
}

#[test]
fn snapshot_serializes_and_round_trips() {
    use geometry_world::{CellCoord, GridGeoref, Position};
    let mut ks = KnowledgeStore::new();
    ks.advance_to(42).unwrap();
    ks.assert_fact("detected-target", vec![Term::sym("c2_3")], Source::Sensor);
    ks.assert_fact("dp-plan-cost", vec![Term::Int(11)], Source::Planner);
    ks.init_map(GridGeoref::new(Position::new(300.0, 300.0, 0.0).unwrap(), 600.0, 5, 5).unwrap());
    ks.map_mut()
        .unwrap()
        .mark_target(CellCoord { col: 2, row: 3 }, 42)
        .unwrap();

    let snap = ks.snapshot();
    let json = serde_json::to_string(&snap).unwrap();
    let back: KnowledgeSnapshot = serde_json::from_str(&json).unwrap();
    assert_eq!(back, snap);
    assert_eq!(back.tick, 42);
    assert_eq!(back.facts().len(), 2);
    assert_eq!(
        back.map.as_ref().unwrap().target_cells(),
        vec![CellCoord { col: 2, row: 3 }]
    );
}
