//! Translation of bus traffic into beliefs.
//!
//! Every decision cycle the agent drains its subscriptions and feeds each
//! envelope through [`ingest`], which writes sensor-sourced facts into the
//! knowledge store and keeps the situational map current. The vocabulary
//! it produces:
//!
//! | fact                             | from                                  |
//! |----------------------------------|---------------------------------------|
//! | `(uav-at X Y ALT)`               | telemetry, coordinates in whole meters |
//! | `(uav-cell SYM)`                 | telemetry, when the fix is on the grid |
//! | `(uav-heading n\|e\|s\|w)`       | telemetry, when the fix is on the grid |
//! | `(detected-target X Y)`          | target detections                      |
//! | `(detected-threat X Y)`          | threat detections                      |
//! | `(inside-threat I)`              | threat-zone crossings (retracted on exit) |
//! | `(waypoint-captured IDX KIND)`   | waypoint captures                      |
//! | `(cell-scanned SYM)`             | scan reports on the status topic       |
//!
//! `uav-cell` and `uav-heading` freeze together while the vehicle is off
//! the grid: both keep their last on-grid values, so downstream planning
//! always sees a consistent pose pair — the point where the survey was
//! left, which is exactly where a re-entry plan must start.
//!
//! The status topic is the command-translation layer's side of the
//! conversation: progress reports as plain fact assertions/retractions,
//! the survey grid frame, and per-cell scan confirmations.

use agent_bus::Envelope;
use geometry_world::{position_to_cell, CellCoord, GridGeoref, Heading, Position, WaypointKind};
use knowledge::{KnowledgeStore, PatTerm, Pattern, Source, Term};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use sil_sim::{Detection, DetectionKind, TOPIC_DETECTIONS, TOPIC_EVENTS, TOPIC_TELEMETRY};

use crate::error::AtcError;

/// Topic on which the command-translation layer reports mission progress
/// back to the agent.
pub const TOPIC_STATUS: &str = "mission-status";

/// Routes one envelope into the knowledge store. Envelopes on topics this
/// module does not know are other modules' traffic and pass through
/// untouched; envelopes on known topics must decode, or the caller gets a
/// [`AtcError::BadEnvelope`] naming the topic.
pub fn ingest(ks: &mut KnowledgeStore, env: &Envelope) -> Result<(), AtcError> {
    match env.channel.as_str() {
        TOPIC_TELEMETRY => ingest_telemetry(ks, env),
        TOPIC_DETECTIONS => ingest_detection(ks, env),
        TOPIC_EVENTS => ingest_sim_event(ks, env),
        TOPIC_STATUS => ingest_status(ks, env),
        _ => Ok(()),
    }
}

/// Grid-cell symbol for a waypoint kind, matching its wire spelling.
pub(crate) fn waypoint_kind_symbol(kind: WaypointKind) -> &'static str {
    match kind {
        WaypointKind::Route => "route",
        WaypointKind::Search => "search",
        WaypointKind::Turnout => "turnout",
        WaypointKind::Acquisition => "acquisition",
        WaypointKind::Goal => "goal",
    }
}

#[derive(Deserialize)]
struct Telemetry {
    x: f64,
    y: f64,
    alt: f64,
    course: f64,
}

fn ingest_telemetry(ks: &mut KnowledgeStore, env: &Envelope) -> Result<(), AtcError> {
    let t: Telemetry = decode(env)?;
    let pos = Position::new(t.x, t.y, t.alt).map_err(|e| bad(env, e.to_string()))?;
    ks.assert_fact(
        "uav-at",
        vec![round_m(t.x), round_m(t.y), round_m(t.alt)],
        Source::Sensor,
    );
    let on_grid = ks
        .map()
        .and_then(|map| position_to_cell(&pos, map.georef()).ok());
    if let Some(cell) = on_grid {
        ks.assert_fact("uav-cell", vec![Term::Sym(cell.symbol())], Source::Sensor);
        ks.assert_fact(
            "uav-heading",
            vec![Term::Sym(Heading::nearest(t.course).symbol().to_string())],
            Source::Sensor,
        );
    }
    Ok(())
}

fn ingest_detection(ks: &mut KnowledgeStore, env: &Envelope) -> Result<(), AtcError> {
    let d: Detection = decode(env)?;
    let predicate = match d.kind {
        DetectionKind::Target => "detected-target",
        DetectionKind::Threat => "detected-threat",
    };
    ks.assert_fact(
        predicate,
        vec![round_m(d.position.x), round_m(d.position.y)],
        Source::Sensor,
    );
    let tick = env.tick;
    if let Some(map) = ks.map_mut() {
        if let Ok(cell) = position_to_cell(&d.position, map.georef()) {
            let marked = match d.kind {
                DetectionKind::Target => map.mark_target(cell, tick),
                DetectionKind::Threat => map.mark_threat(cell, tick),
            };
            marked.expect("cell from position_to_cell lies on the grid");
        }
    }
    Ok(())
}

/// The shared events topic multiplexes waypoint captures and threat-zone
/// crossings; the payload shape tells them apart.
fn ingest_sim_event(ks: &mut KnowledgeStore, env: &Envelope) -> Result<(), AtcError> {
    let obj = env
        .payload
        .as_object()
        .ok_or_else(|| bad(env, "payload is not an object".to_string()))?;
    if obj.contains_key("threat") {
        #[derive(Deserialize)]
        struct Crossing {
            threat: usize,
            inside: bool,
        }
        let c: Crossing = decode(env)?;
        if c.inside {
            ks.assert_fact(
                "inside-threat",
                vec![Term::Int(c.threat as i64)],
                Source::Sensor,
            );
        } else {
            ks.retract_sensor(&Pattern::new(
                "inside-threat",
                vec![PatTerm::Int(c.threat as i64)],
            ));
        }
        Ok(())
    } else if obj.contains_key("index") {
        let w: geometry_world::Waypoint = decode(env)?;
        ks.assert_fact(
            "waypoint-captured",
            vec![
                Term::Int(w.index as i64),
                Term::Sym(waypoint_kind_symbol(w.kind).to_string()),
            ],
            Source::Sensor,
        );
        Ok(())
    } else {
        Err(bad(env, "neither a capture nor a threat crossing".to_string()))
    }
}

/// One message on the status topic.
#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum StatusMsg {
    /// `{"assert": {"predicate": ..., "args": [...]}}` — a progress fact.
    Assert(FactSpec),
    /// `{"retract": ...}` — drop matching sensor facts; a `null` argument
    /// matches anything in that position.
    Retract(RetractSpec),
    /// `{"grid": ...}` — install the survey grid frame (once).
    Grid(GridGeoref),
    /// `{"scanned": "cC_R"}` — a sector scan completed over that cell.
    Scanned(String),
}

#[derive(Deserialize)]
struct FactSpec {
    predicate: String,
    #[serde(default)]
    args: Vec<ScalarArg>,
}

#[derive(Deserialize)]
struct RetractSpec {
    predicate: String,
    #[serde(default)]
    args: Vec<Option<ScalarArg>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarArg {
    Int(i64),
    Sym(String),
}

fn ingest_status(ks: &mut KnowledgeStore, env: &Envelope) -> Result<(), AtcError> {
    match decode(env)? {
        StatusMsg::Assert(spec) => {
            let args = spec
                .args
                .into_iter()
                .map(|a| match a {
                    ScalarArg::Int(n) => Term::Int(n),
                    ScalarArg::Sym(s) => Term::Sym(s),
                })
                .collect();
            ks.assert_fact(&spec.predicate, args, Source::Sensor);
        }
        StatusMsg::Retract(spec) => {
            let args = spec
                .args
                .into_iter()
                .enumerate()
                .map(|(i, a)| match a {
                    None => PatTerm::Var(format!("any{i}")),
                    Some(ScalarArg::Int(n)) => PatTerm::Int(n),
                    Some(ScalarArg::Sym(s)) => PatTerm::Sym(s),
                })
                .collect();
            ks.retract_sensor(&Pattern::new(spec.predicate, args));
        }
        StatusMsg::Grid(georef) => {
            if ks.map().is_some() {
                return Err(AtcError::GridAlreadyInstalled);
            }
            ks.init_map(georef);
        }
        StatusMsg::Scanned(symbol) => {
            let cell = CellCoord::from_symbol(&symbol)
                .ok_or_else(|| bad(env, format!("'{symbol}' is not a cell symbol")))?;
            let tick = env.tick;
            let map = ks
                .map_mut()
                .ok_or_else(|| bad(env, "scan report before any grid was installed".to_string()))?;
            map.mark_scanned(cell, tick)
                .map_err(|e| bad(env, e.to_string()))?;
            ks.assert_fact("cell-scanned", vec![Term::Sym(symbol)], Source::Sensor);
        }
    }
    Ok(())
}

fn round_m(v: f64) -> Term {
    Term::Int(v.round() as i64)
}

fn decode<T: DeserializeOwned>(env: &Envelope) -> Result<T, AtcError> {
    serde_json::from_value(env.payload.clone()).map_err(|e| bad(env, e.to_string()))
}

fn bad(env: &Envelope, reason: String) -> AtcError {
    AtcError::BadEnvelope {
        topic: env.channel.clone(),
        reason,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use agent_bus::Kind;
    use serde_json::{json, Value};

    fn env_at(tick: u64, topic: &str, payload: Value) -> Envelope {
        Envelope {
            msg_id: 1,
            correlation_id: None,
            kind: Kind::Event,
            channel: topic.to_string(),
            sender: "sim".to_string(),
            payload,
            tick,
        }
    }

    fn env(topic: &str, payload: Value) -> Envelope {
        env_at(0, topic, payload)
    }

    fn telemetry(x: f64, y: f64, course: f64) -> Envelope {
        env(
            TOPIC_TELEMETRY,
            json!({"x": x, "y": y, "alt": 120.0, "course": course, "speed": 15.0, "distance": 0.0}),
        )
    }

    fn grid() -> Value {
        json!({"grid": {"origin": {"x": 300.0, "y": 300.0, "alt": 120.0}, "cell_size": 600.0, "cols": 5, "rows": 5}})
    }

    fn query(ks: &KnowledgeStore, pat: &str) -> usize {
        ks.query(&Pattern::parse(pat).unwrap()).len()
    }

    #[test]
    fn telemetry_becomes_a_rounded_position_fact() {
        let mut ks = KnowledgeStore::new();
        ingest(&mut ks, &telemetry(1499.6, -2500.4, 0.0)).unwrap();
        let hits = ks.query(&Pattern::parse("(uav-at ?x ?y ?alt)").unwrap());
        assert_eq!(hits.len(), 1);
        assert_eq!(
            hits[0].args,
            vec![Term::Int(1500), Term::Int(-2500), Term::Int(120)]
        );
        // No grid yet, so no cell or heading beliefs.
        assert_eq!(query(&ks, "(uav-cell ?c)"), 0);
        assert_eq!(query(&ks, "(uav-heading ?h)"), 0);
    }

    #[test]
    fn on_grid_fixes_carry_cell_and_heading() {
        let mut ks = KnowledgeStore::new();
        ingest(&mut ks, &env(TOPIC_STATUS, grid())).unwrap();
        ingest(&mut ks, &telemetry(950.0, 880.0, 92.0)).unwrap();
        let cell = ks.query(&Pattern::parse("(uav-cell ?c)").unwrap());
        assert_eq!(cell[0].args, vec![Term::Sym("c1_1".into())]);
        let heading = ks.query(&Pattern::parse("(uav-heading ?h)").unwrap());
        assert_eq!(heading[0].args, vec![Term::Sym("e".into())]);
    }

    #[test]
    fn off_grid_fixes_freeze_the_pose_pair() {
        let mut ks = KnowledgeStore::new();
        ingest(&mut ks, &env(TOPIC_STATUS, grid())).unwrap();
        ingest(&mut ks, &telemetry(950.0, 880.0, 92.0)).unwrap();
        // Fly off the south edge of the grid, heading north.
        ingest(&mut ks, &telemetry(950.0, -200.0, 2.0)).unwrap();
        let cell = ks.query(&Pattern::parse("(uav-cell ?c)").unwrap());
        assert_eq!(cell[0].args, vec![Term::Sym("c1_1".into())]);
        let heading = ks.query(&Pattern::parse("(uav-heading ?h)").unwrap());
        assert_eq!(heading[0].args, vec![Term::Sym("e".into())]);
        // The raw position still tracks the vehicle: positions accumulate
        // and the newest revision is the current fix.
        let at = ks.query(&Pattern::parse("(uav-at ?x ?y ?a)").unwrap());
        assert_eq!(at.last().unwrap().args[1], Term::Int(-200));
    }

    #[test]
    fn detections_become_facts_and_map_markers() {
        let mut ks = KnowledgeStore::new();
        let detection = json!({
            "kind": "target",
            "position": {"x": 2100.0, "y": 900.0, "alt": 0.0},
            "tick": 7
        });
        // Without a map: fact only.
        ingest(&mut ks, &env_at(7, TOPIC_DETECTIONS, detection.clone())).unwrap();
        assert_eq!(query(&ks, "(detected-target 2100 900)"), 1);

        ingest(&mut ks, &env(TOPIC_STATUS, grid())).unwrap();
        ingest(&mut ks, &env_at(9, TOPIC_DETECTIONS, detection)).unwrap();
        let map = ks.map().unwrap();
        assert_eq!(map.target_cells(), vec![CellCoord::new(3, 1)]);

        let threat = json!({
            "kind": "threat",
            "position": {"x": 1000.0, "y": 400.0, "alt": 0.0},
            "tick": 9
        });
        ingest(&mut ks, &env_at(9, TOPIC_DETECTIONS, threat)).unwrap();
        assert_eq!(query(&ks, "(detected-threat 1000 400)"), 1);
        assert!(ks.map().unwrap().is_threat(CellCoord::new(1, 0)));
    }

    #[test]
    fn threat_crossings_toggle_the_inside_fact() {
        let mut ks = KnowledgeStore::new();
        let crossing = |inside: bool| {
            env(
                TOPIC_EVENTS,
                json!({"threat": 0, "inside": inside, "x": 1000.0, "y": 400.0, "radius": 400.0}),
            )
        };
        // An exit with no recorded entry (started inside) is a no-op.
        ingest(&mut ks, &crossing(false)).unwrap();
        assert_eq!(query(&ks, "(inside-threat 0)"), 0);
        ingest(&mut ks, &crossing(true)).unwrap();
        assert_eq!(query(&ks, "(inside-threat 0)"), 1);
        ingest(&mut ks, &crossing(false)).unwrap();
        assert_eq!(query(&ks, "(inside-threat 0)"), 0);
    }

    #[test]
    fn waypoint_captures_are_recorded_with_their_kind() {
        let mut ks = KnowledgeStore::new();
        let capture = json!({
            "position": {"x": 1500.0, "y": 400.0, "alt": 120.0},
            "kind": "route",
            "index": 3
        });
        ingest(&mut ks, &env(TOPIC_EVENTS, capture)).unwrap();
        assert_eq!(query(&ks, "(waypoint-captured 3 route)"), 1);
    }

    #[test]
    fn kind_symbols_match_the_wire_spelling() {
        for kind in [
            WaypointKind::Route,
            WaypointKind::Search,
            WaypointKind::Turnout,
            WaypointKind::Acquisition,
            WaypointKind::Goal,
        ] {
            let wire = serde_json::to_value(kind).unwrap();
            assert_eq!(wire, json!(waypoint_kind_symbol(kind)));
        }
    }

    #[test]
    fn status_asserts_and_retracts_progress_facts() {
        let mut ks = KnowledgeStore::new();
        ingest(
            &mut ks,
            &env(TOPIC_STATUS, json!({"assert": {"predicate": "survey-complete"}})),
        )
        .unwrap();
        assert_eq!(query(&ks, "(survey-complete)"), 1);
        ingest(
            &mut ks,
            &env(
                TOPIC_STATUS,
                json!({"assert": {"predicate": "dp-goal-cell", "args": ["c2_4"]}}),
            ),
        )
        .unwrap();
        assert_eq!(query(&ks, "(dp-goal-cell c2_4)"), 1);
        // Wildcard retraction: null matches any argument.
        ingest(
            &mut ks,
            &env(
                TOPIC_STATUS,
                json!({"retract": {"predicate": "dp-goal-cell", "args": [null]}}),
            ),
        )
        .unwrap();
        assert_eq!(query(&ks, "(dp-goal-cell ?c)"), 0);
    }

    #[test]
    fn the_grid_installs_exactly_once() {
        let mut ks = KnowledgeStore::new();
        ingest(&mut ks, &env(TOPIC_STATUS, grid())).unwrap();
        assert!(ks.map().is_some());
        let err = ingest(&mut ks, &env(TOPIC_STATUS, grid())).unwrap_err();
        assert!(matches!(err, AtcError::GridAlreadyInstalled));
    }

    #[test]
    fn scan_reports_mark_the_map_and_the_store() {
        let mut ks = KnowledgeStore::new();
        let scanned = json!({"scanned": "c3_1"});
        let err = ingest(&mut ks, &env(TOPIC_STATUS, scanned.clone())).unwrap_err();
        assert!(matches!(err, AtcError::BadEnvelope { .. }));

        ingest(&mut ks, &env(TOPIC_STATUS, grid())).unwrap();
        ingest(&mut ks, &env_at(40, TOPIC_STATUS, scanned)).unwrap();
        assert!(ks.map().unwrap().is_scanned(CellCoord::new(3, 1)));
        assert_eq!(query(&ks, "(cell-scanned c3_1)"), 1);
    }

    #[test]
    fn malformed_payloads_name_their_topic() {
        let mut ks = KnowledgeStore::new();
        let err = ingest(&mut ks, &env(TOPIC_TELEMETRY, json!({"x": "not a number"}))).unwrap_err();
        match err {
            AtcError::BadEnvelope { topic, .. } => assert_eq!(topic, TOPIC_TELEMETRY),
            other => panic!("expected bad envelope, got {other:?}"),
        }
    }

    #[test]
    fn unknown_topics_pass_through() {
        let mut ks = KnowledgeStore::new();
        ingest(&mut ks, &env("somebody-elses-topic", json!({"whatever": 1}))).unwrap();
        assert!(ks.dump().is_empty());
    }
}
