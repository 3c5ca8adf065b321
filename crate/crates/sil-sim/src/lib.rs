//! Deterministic software-in-the-loop flight environment: fixed-wing
//! kinematics, waypoint pursuit, sector sensing against ground truth, and
//! the command/telemetry boundary between the vehicle and its agents.
//!
//! The simulator owns the clock. Each tick moves the airframe under
//! bounded-rate turns at constant speed, senses whatever the gimbal is
//! aimed at, edge-detects threat-zone crossings, and dispatches every
//! event to the message bus and the mission log before the next tick
//! begins. Nothing in the loop draws randomness, so a configuration fully
//! determines the event stream — and a forked simulator is a faithful
//! branch point for flying mission variants from the same state.

mod command;
mod error;
mod log;
mod sensor;
mod sim;
mod uav;
mod world;

pub use command::Command;
pub use error::SimError;
pub use log::{LogRecord, MissionLog, MISSION_COMPLETE, MISSION_FAILED};
pub use sensor::{sense, Detection, DetectionKind, GimbalSector, SensorConfig};
pub use sim::{
    SimConfig, SimEvent, Simulator, UavInit, SENDER, TOPIC_DETECTIONS, TOPIC_EVENTS,
    TOPIC_TELEMETRY,
};
pub use uav::{step_kinematics, ActiveGuidance, KinematicLimits, UavState};
pub use world::{Bounds, TargetTruth, ThreatZone, WorldTruth};
