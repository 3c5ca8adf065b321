//! Kinematic envelope checks over whole simulated flights: bounded-rate
//! turns only, no teleporting, and waypoint capture inside independently
//! computed time bounds.

use agent_bus::Bus;
use geometry_world::{Position, Waypoint, WaypointKind};
use sil_sim::{
    Bounds, Command, KinematicLimits, MissionLog, SensorConfig, SimConfig, SimEvent, Simulator,
    UavInit, WorldTruth,
};
use std::f64::consts::PI;

fn config() -> SimConfig {
    SimConfig {
        dt: 0.5,
        limits: KinematicLimits::default(),
        sensor: SensorConfig::default(),
        world: WorldTruth {
            bounds: Bounds {
                min_x: -2000.0,
                min_y: -2000.0,
                max_x: 2000.0,
                max_y: 2000.0,
            },
            targets: vec![],
            threats: vec![],
        },
        uav: UavInit {
            x: 0.0,
            y: 0.0,
            alt: 100.0,
            course: 0.0,
            speed: 15.0,
        },
    }
}

fn goto(x: f64, y: f64, index: u32) -> Command {
    Command::GotoWaypoint {
        waypoint: Waypoint {
            position: Position::new(x, y, 100.0).unwrap(),
            kind: WaypointKind::Route,
            index,
        },
    }
}

/// Runs until the pursued waypoint captures, asserting the fixed-wing
/// trace invariants on every tick: course change at most rate * dt and
/// ground displacement exactly speed * dt (the airframe cannot jump).
/// Returns the capture tick.
fn fly_to_capture(sim: &mut Simulator, max_ticks: u64) -> u64 {
    let mut bus = Bus::new();
    let mut log = MissionLog::new();
    let limits = *sim.limits();
    let dt = sim.dt();
    let mut prev = *sim.uav();
    for _ in 0..max_ticks {
        let events = sim.run_tick(&mut bus, &mut log).unwrap();
        let now = *sim.uav();

        let mut turn = (now.course - prev.course).abs();
        if turn > 180.0 {
            turn = 360.0 - turn; // course wraps at north
        }
        assert!(
            turn <= limits.max_turn_rate_deg_s * dt + 1e-9,
            "tick {}: turned {turn}°, over the rate limit",
            now.tick
        );
        let moved = prev.position.horizontal_distance(&now.position);
        assert!(
            (moved - now.speed * dt).abs() < 1e-9,
            "tick {}: moved {moved} m in one step",
            now.tick
        );

        if events
            .iter()
            .any(|e| matches!(e, SimEvent::WaypointCaptured { .. }))
        {
            return now.tick;
        }
        prev = now;
    }
    panic!("no capture within {max_ticks} ticks");
}

/// A waypoint directly behind forces the full bounded-rate reversal. The
/// time bound is computed from the limits alone: the flown path cannot
/// exceed the initial distance plus two full minimum-radius circles, and
/// it cannot beat the straight-line distance either.
#[test]
fn waypoint_directly_behind_captures_within_the_computed_bound() {
    let mut sim = Simulator::new(config()).unwrap();
    sim.submit(goto(0.0, -400.0, 0)).unwrap();

    let limits = *sim.limits();
    let v = sim.uav().speed;
    let step = v * sim.dt();
    let turn_radius = v / limits.max_turn_rate_deg_s.to_radians();
    let d0 = 400.0;
    let upper = ((d0 + 4.0 * PI * turn_radius) / step).ceil() as u64 + 1;
    let lower = ((d0 - limits.capture_radius_m) / step).floor() as u64;

    let captured_at = fly_to_capture(&mut sim, upper);
    assert!(
        captured_at >= lower,
        "captured at tick {captured_at}, faster than a straight line"
    );
}

#[test]
fn waypoint_behind_and_offset_captures_within_the_computed_bound() {
    let mut sim = Simulator::new(config()).unwrap();
    sim.submit(goto(100.0, -400.0, 0)).unwrap();

    let limits = *sim.limits();
    let v = sim.uav().speed;
    let step = v * sim.dt();
    let turn_radius = v / limits.max_turn_rate_deg_s.to_radians();
    let d0 = (100.0_f64 * 100.0 + 400.0 * 400.0).sqrt();
    let upper = ((d0 + 4.0 * PI * turn_radius) / step).ceil() as u64 + 1;
    let lower = ((d0 - limits.capture_radius_m) / step).floor() as u64;

    let captured_at = fly_to_capture(&mut sim, upper);
    assert!(captured_at >= lower);
}

/// Four corners of a square, captured in command order, with the trace
/// invariants holding across waypoint replacements.
#[test]
fn square_circuit_captures_every_corner_in_order() {
    let mut sim = Simulator::new(config()).unwrap();
    let corners = [(0.0, 600.0), (600.0, 600.0), (600.0, 0.0), (0.0, 0.0)];
    let mut capture_ticks = Vec::new();
    for (i, (x, y)) in corners.iter().enumerate() {
        sim.submit(goto(*x, *y, i as u32)).unwrap();
        capture_ticks.push(fly_to_capture(&mut sim, 200));
    }
    assert_eq!(capture_ticks.len(), 4);
    assert!(
        capture_ticks.windows(2).all(|w| w[0] < w[1]),
        "captures out of order: {capture_ticks:?}"
    );
    // The whole circuit is four 600 m legs minus capture slop; distance
    // accounting must agree with the tick count exactly.
    let expected = capture_ticks[3] as f64 * 15.0 * 0.5;
    assert!((sim.total_distance() - expected).abs() / expected < 1e-9);
}
