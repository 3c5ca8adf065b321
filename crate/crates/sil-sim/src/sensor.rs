use geometry_world::{angle_diff, bearing, normalize_course, Position};
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::uav::UavState;
use crate::world::WorldTruth;

/// Which of the three gimbal sectors the sensor is aimed at, relative to
/// the current course. The serialized spellings double as the symbolic
/// scan directions the planner's gimbal directives use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GimbalSector {
    Forward,
    Left,
    Right,
}

impl GimbalSector {
    /// Sector center offset from the vehicle course, degrees.
    pub fn offset_deg(self) -> f64 {
        match self {
            GimbalSector::Forward => 0.0,
            GimbalSector::Left => -90.0,
            GimbalSector::Right => 90.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            GimbalSector::Forward => "forward",
            GimbalSector::Left => "left",
            GimbalSector::Right => "right",
        }
    }
}

/// Sensor footprint: a circular-arc sector of `2 * half_angle_deg` degrees
/// centered on course + sector offset, out to `range_m` meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SensorConfig {
    /// Detection range, meters (ground distance).
    pub range_m: f64,
    /// Half the sector's angular width, degrees. The default 45° gives the
    /// three 90° sectors that together sweep everything but the rear cone.
    pub half_angle_deg: f64,
}

impl Default for SensorConfig {
    fn default() -> SensorConfig {
        SensorConfig {
            range_m: 700.0,
            half_angle_deg: 45.0,
        }
    }
}

impl SensorConfig {
    pub fn check(&self) -> Result<(), SimError> {
        if !self.range_m.is_finite() || self.range_m <= 0.0 {
            return Err(SimError::InvalidConfig {
                reason: "sensor range-m must be finite and positive".into(),
            });
        }
        if !self.half_angle_deg.is_finite()
            || self.half_angle_deg <= 0.0
            || self.half_angle_deg > 180.0
        {
            return Err(SimError::InvalidConfig {
                reason: "sensor half-angle-deg must lie in (0, 180]".into(),
            });
        }
        Ok(())
    }
}

/// What kind of ground entity a detection reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectionKind {
    Target,
    Threat,
}

/// One sighting: the true position of a world entity that satisfied the
/// range-and-sector predicate at `tick`. Detection is noiseless — the
/// reported position is ground truth, and re-sighting the same entity on
/// consecutive ticks is normal (deduplication is a belief-level concern).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub kind: DetectionKind,
    pub position: Position,
    pub tick: u64,
}

/// Reports every world entity inside the aimed sector: ground distance at
/// most `cfg.range_m` (boundary included) and bearing within
/// `cfg.half_angle_deg` of the sector center (boundary included), skipping
/// entities whose `detect_after` tick has not arrived. Deterministic order:
/// targets before threats, each in declaration order.
pub fn sense(
    u: &UavState,
    world: &WorldTruth,
    sector: GimbalSector,
    cfg: &SensorConfig,
) -> Vec<Detection> {
    let center = normalize_course(u.course + sector.offset_deg());
    let mut out = Vec::new();
    let mut consider = |kind: DetectionKind, position: Position, detect_after: u64| {
        if u.tick < detect_after {
            return;
        }
        if u.position.horizontal_distance(&position) > cfg.range_m {
            return;
        }
        if angle_diff(center, bearing(&u.position, &position)).abs() > cfg.half_angle_deg {
            return;
        }
        out.push(Detection {
            kind,
            position,
            tick: u.tick,
        });
    };
    for t in &world.targets {
        consider(DetectionKind::Target, t.position(), t.detect_after);
    }
    for z in &world.threats {
        consider(DetectionKind::Threat, z.center(), z.detect_after);
    }
    out
}
