use agent_bus::Bus;
use geometry_world::{normalize_course, Position, Waypoint};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::command::Command;
use crate::error::SimError;
use crate::log::MissionLog;
use crate::sensor::{sense, Detection, GimbalSector, SensorConfig};
use crate::uav::{step_kinematics, ActiveGuidance, KinematicLimits, UavState};
use crate::world::{ThreatZone, WorldTruth};

/// Sender name stamped on every envelope the simulator publishes.
pub const SENDER: &str = "sim";
/// Topic carrying one position/course/distance report per tick.
pub const TOPIC_TELEMETRY: &str = "telemetry";
/// Topic carrying sensor detections.
pub const TOPIC_DETECTIONS: &str = "detections";
/// Topic carrying discrete flight events: waypoint captures and threat
/// zone boundary crossings.
pub const TOPIC_EVENTS: &str = "sim-events";

fn default_dt() -> f64 {
    0.5
}

/// Initial flight state, as written in a scenario file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct UavInit {
    pub x: f64,
    pub y: f64,
    pub alt: f64,
    /// Compass course in degrees; normalized on load.
    pub course: f64,
    /// Constant airspeed for the whole mission, m/s.
    pub speed: f64,
}

/// Everything the simulator needs to fly: the time step, the airframe
/// envelope, the sensor footprint, ground truth, and the initial state.
/// All numeric parameters live here so a scenario file — not the code —
/// decides them; the serde defaults only fill sections a file omits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimConfig {
    /// Seconds per tick.
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub limits: KinematicLimits,
    #[serde(default)]
    pub sensor: SensorConfig,
    pub world: WorldTruth,
    pub uav: UavInit,
}

impl SimConfig {
    /// Rejects configurations that cannot describe a flyable scenario.
    pub fn check(&self) -> Result<(), SimError> {
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(SimError::InvalidConfig {
                reason: "dt must be finite and positive".into(),
            });
        }
        self.limits.check()?;
        self.sensor.check()?;
        self.world.check()?;
        let u = &self.uav;
        for (name, v) in [
            ("x", u.x),
            ("y", u.y),
            ("alt", u.alt),
            ("course", u.course),
            ("speed", u.speed),
        ] {
            if !v.is_finite() {
                return Err(SimError::InvalidConfig {
                    reason: format!("uav {name} is not finite"),
                });
            }
        }
        if u.alt < 0.0 {
            return Err(SimError::InvalidConfig {
                reason: "uav alt must be non-negative".into(),
            });
        }
        if u.speed < self.limits.v_min || u.speed > self.limits.v_max {
            return Err(SimError::InvalidConfig {
                reason: format!(
                    "uav speed {} is outside the [{}, {}] envelope",
                    u.speed, self.limits.v_min, self.limits.v_max
                ),
            });
        }
        let start = Position {
            x: u.x,
            y: u.y,
            alt: u.alt,
        };
        if !self.world.bounds.contains(&start) {
            return Err(SimError::InvalidConfig {
                reason: "uav initial position lies outside the scenario bounds".into(),
            });
        }
        Ok(())
    }
}

/// One observable thing that happened during a tick, in emission order:
/// telemetry first, then a capture if the pursued waypoint was reached,
/// then detections, then threat-zone boundary crossings.
#[derive(Debug, Clone, PartialEq)]
pub enum SimEvent {
    Telemetry {
        position: Position,
        course: f64,
        speed: f64,
        /// Cumulative ground distance flown since the start, meters.
        distance: f64,
    },
    WaypointCaptured {
        waypoint: Waypoint,
    },
    Detected(Detection),
    /// The vehicle crossed into a threat zone this tick (edge-triggered:
    /// re-emitted only after leaving and re-entering).
    ThreatEntered {
        threat: usize,
        zone: ThreatZone,
    },
    /// The vehicle crossed out of a threat zone this tick.
    ThreatExited {
        threat: usize,
        zone: ThreatZone,
    },
}

impl SimEvent {
    /// The mission-log record kind for this event.
    pub fn kind(&self) -> &'static str {
        match self {
            SimEvent::Telemetry { .. } => "telemetry",
            SimEvent::WaypointCaptured { .. } => "waypoint-capture",
            SimEvent::Detected(_) => "detection",
            SimEvent::ThreatEntered { .. } => "threat-enter",
            SimEvent::ThreatExited { .. } => "threat-exit",
        }
    }

    /// The bus topic this event is published on.
    pub fn topic(&self) -> &'static str {
        match self {
            SimEvent::Telemetry { .. } => TOPIC_TELEMETRY,
            SimEvent::Detected(_) => TOPIC_DETECTIONS,
            _ => TOPIC_EVENTS,
        }
    }

    /// The JSON payload, identical on the bus and in the mission log. The
    /// telemetry payload is the source from which position and heading
    /// beliefs (`uav-at`, `uav-heading`) are derived downstream.
    pub fn payload(&self) -> Value {
        match self {
            SimEvent::Telemetry {
                position,
                course,
                speed,
                distance,
            } => json!({
                "x": position.x,
                "y": position.y,
                "alt": position.alt,
                "course": course,
                "speed": speed,
                "distance": distance,
            }),
            SimEvent::WaypointCaptured { waypoint } => {
                serde_json::to_value(waypoint).expect("waypoints are plain data")
            }
            SimEvent::Detected(d) => serde_json::to_value(d).expect("detections are plain data"),
            // Crossings carry `inside` because both edges share the events
            // topic and bus envelopes have no record kind of their own.
            SimEvent::ThreatEntered { threat, zone } => json!({
                "threat": threat,
                "inside": true,
                "x": zone.x,
                "y": zone.y,
                "radius": zone.radius,
            }),
            SimEvent::ThreatExited { threat, zone } => json!({
                "threat": threat,
                "inside": false,
                "x": zone.x,
                "y": zone.y,
                "radius": zone.radius,
            }),
        }
    }
}

/// The deterministic flight environment. It owns the clock: one
/// [`Simulator::run_tick`] advances time by `dt`, moves the airframe,
/// senses the world, and dispatches every resulting event to the bus and
/// the mission log before returning — agents react strictly between ticks.
///
/// There is no randomness anywhere in the loop, so a configuration fully
/// determines the event stream, and [`Simulator::fork`] at any point
/// yields a branch that replays identically under identical commands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Simulator {
    dt: f64,
    limits: KinematicLimits,
    sensor: SensorConfig,
    world: WorldTruth,
    uav: UavState,
    guidance: ActiveGuidance,
    gimbal: GimbalSector,
    /// Per-threat membership from the previous tick, for edge detection.
    inside_threat: Vec<bool>,
    total_distance: f64,
}

impl Simulator {
    /// Builds a simulator from a validated configuration. Threat-zone
    /// membership is initialized from the starting position, so starting
    /// inside a zone produces no synthetic enter event — only boundary
    /// crossings do.
    pub fn new(cfg: SimConfig) -> Result<Simulator, SimError> {
        cfg.check()?;
        let position = Position {
            x: cfg.uav.x,
            y: cfg.uav.y,
            alt: cfg.uav.alt,
        };
        let inside_threat = cfg
            .world
            .threats
            .iter()
            .map(|z| z.contains(&position))
            .collect();
        Ok(Simulator {
            dt: cfg.dt,
            limits: cfg.limits,
            sensor: cfg.sensor,
            world: cfg.world,
            uav: UavState {
                position,
                course: normalize_course(cfg.uav.course),
                speed: cfg.uav.speed,
                tick: 0,
            },
            guidance: ActiveGuidance::default(),
            gimbal: GimbalSector::Forward,
            inside_threat,
            total_distance: 0.0,
        })
    }

    pub fn uav(&self) -> &UavState {
        &self.uav
    }

    pub fn tick(&self) -> u64 {
        self.uav.tick
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn limits(&self) -> &KinematicLimits {
        &self.limits
    }

    pub fn world(&self) -> &WorldTruth {
        &self.world
    }

    pub fn guidance(&self) -> &ActiveGuidance {
        &self.guidance
    }

    pub fn gimbal(&self) -> GimbalSector {
        self.gimbal
    }

    /// Cumulative ground distance flown, meters.
    pub fn total_distance(&self) -> f64 {
        self.total_distance
    }

    /// Accepts a command, effective from the next tick.
    pub fn submit(&mut self, cmd: Command) -> Result<(), SimError> {
        match cmd {
            Command::GotoWaypoint { waypoint } => {
                if !self.world.bounds.contains(&waypoint.position) {
                    return Err(SimError::WaypointOutOfBounds {
                        x: waypoint.position.x,
                        y: waypoint.position.y,
                    });
                }
                self.guidance.waypoint = Some(waypoint);
                self.guidance.alt_target = None;
            }
            Command::SetAltitude { alt_m } => {
                if !alt_m.is_finite() || alt_m < 0.0 {
                    return Err(SimError::BadAltitude(alt_m));
                }
                self.guidance.alt_target = Some(alt_m);
            }
            Command::GimbalSector { sector } => self.gimbal = sector,
        }
        Ok(())
    }

    /// A branch point: an identical simulator that evolves independently
    /// from here. Used to fly mission variants from the same mid-mission
    /// state; equality of [`Simulator::state_hash`] proves the branch
    /// point really was shared.
    pub fn fork(&self) -> Simulator {
        self.clone()
    }

    /// Content hash of the full simulator state (configuration included),
    /// hex-encoded.
    pub fn state_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("simulator state is plain data");
        let digest = Sha256::digest(&bytes);
        let mut out = String::with_capacity(64);
        for b in digest {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }

    /// Advances one tick: move, sense, detect boundary crossings, then
    /// publish and log every event before returning them. The bus clock is
    /// advanced first so request timeouts fire and every envelope carries
    /// the new tick.
    pub fn run_tick(&mut self, bus: &mut Bus, log: &mut MissionLog) -> Result<Vec<SimEvent>, SimError> {
        let (next, captured) = step_kinematics(&self.uav, &self.guidance, &self.limits, self.dt);
        self.total_distance += self.uav.speed * self.dt;
        self.uav = next;
        bus.advance_to(self.uav.tick);

        let mut events = vec![SimEvent::Telemetry {
            position: self.uav.position,
            course: self.uav.course,
            speed: self.uav.speed,
            distance: self.total_distance,
        }];
        if captured {
            let waypoint = self.guidance.waypoint.take().expect("capture implies pursuit");
            events.push(SimEvent::WaypointCaptured { waypoint });
        }
        events.extend(
            sense(&self.uav, &self.world, self.gimbal, &self.sensor)
                .into_iter()
                .map(SimEvent::Detected),
        );
        for i in 0..self.world.threats.len() {
            let zone = self.world.threats[i];
            let now = zone.contains(&self.uav.position);
            match (self.inside_threat[i], now) {
                (false, true) => events.push(SimEvent::ThreatEntered { threat: i, zone }),
                (true, false) => events.push(SimEvent::ThreatExited { threat: i, zone }),
                _ => {}
            }
            self.inside_threat[i] = now;
        }

        for e in &events {
            log.append(self.uav.tick, e.kind(), e.payload())?;
            bus.publish(e.topic(), SENDER, e.payload());
        }
        Ok(events)
    }
}
