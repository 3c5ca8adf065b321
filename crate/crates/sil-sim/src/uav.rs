use geometry_world::{angle_diff, bearing, normalize_course, Position, Waypoint};
use serde::{Deserialize, Serialize};

use crate::error::SimError;

/// Fixed-wing performance envelope. A fixed-wing airframe cannot hover
/// (`v_min` is strictly positive) or turn in place (`max_turn_rate_deg_s`
/// bounds course change), which is exactly what makes the planner's fused
/// turn-and-move actions the right motion vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct KinematicLimits {
    /// Slowest controllable airspeed, m/s; must be positive.
    pub v_min: f64,
    /// Fastest commanded airspeed, m/s.
    pub v_max: f64,
    /// Course change ceiling, degrees per second.
    pub max_turn_rate_deg_s: f64,
    /// Vertical speed used to slew toward a commanded altitude, m/s.
    pub climb_rate_m_s: f64,
    /// A waypoint counts as reached within this horizontal distance, m.
    pub capture_radius_m: f64,
}

impl Default for KinematicLimits {
    fn default() -> KinematicLimits {
        KinematicLimits {
            v_min: 10.0,
            v_max: 30.0,
            max_turn_rate_deg_s: 20.0,
            climb_rate_m_s: 5.0,
            capture_radius_m: 50.0,
        }
    }
}

impl KinematicLimits {
    pub fn check(&self) -> Result<(), SimError> {
        for (name, v) in [
            ("v-min", self.v_min),
            ("v-max", self.v_max),
            ("max-turn-rate-deg-s", self.max_turn_rate_deg_s),
            ("climb-rate-m-s", self.climb_rate_m_s),
            ("capture-radius-m", self.capture_radius_m),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(SimError::InvalidConfig {
                    reason: format!("kinematic limit {name} must be finite and positive"),
                });
            }
        }
        if self.v_min > self.v_max {
            return Err(SimError::InvalidConfig {
                reason: "v-min must not exceed v-max".into(),
            });
        }
        Ok(())
    }
}

/// The physical flight state at one instant. `course` is a compass course
/// in [0, 360); `tick` counts completed simulation steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UavState {
    pub position: Position,
    pub course: f64,
    pub speed: f64,
    pub tick: u64,
}

/// The guidance currently steering the airframe: at most one waypoint being
/// flown and at most one standing altitude command. Gimbal aim is sensing
/// state, not guidance — it never moves the vehicle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ActiveGuidance {
    /// Waypoint under pursuit, if any. Cleared on capture.
    pub waypoint: Option<Waypoint>,
    /// Altitude override from a standing set-altitude command. When absent
    /// the pursued waypoint's altitude is the vertical target.
    pub alt_target: Option<f64>,
}

impl ActiveGuidance {
    /// The altitude the airframe is slewing toward, if any source names one.
    /// A standing altitude command outranks the waypoint's own altitude
    /// because it was necessarily issued later (accepting a waypoint clears
    /// any previous override).
    pub fn target_alt(&self) -> Option<f64> {
        self.alt_target.or_else(|| self.waypoint.map(|w| w.position.alt))
    }
}

/// Advances the flight state by one step of `dt` seconds: turn toward the
/// pursued waypoint at no more than the limit rate, advance `speed * dt`
/// along the new course, slew altitude toward the vertical target, then
/// check waypoint capture. Returns the new state and whether the pursued
/// waypoint was captured during the step.
///
/// Capture is judged on horizontal distance at either end of the step, so a
/// waypoint already inside the capture radius captures on the very next
/// step — the airframe never has to re-approach a point it is sitting on.
pub fn step_kinematics(
    u: &UavState,
    guidance: &ActiveGuidance,
    limits: &KinematicLimits,
    dt: f64,
) -> (UavState, bool) {
    debug_assert!(dt > 0.0, "a kinematic step needs positive duration");

    let mut course = u.course;
    if let Some(wp) = &guidance.waypoint {
        let desired = bearing(&u.position, &wp.position);
        let max_step = limits.max_turn_rate_deg_s * dt;
        course = normalize_course(course + angle_diff(course, desired).clamp(-max_step, max_step));
    }

    let rad = course.to_radians();
    let travel = u.speed * dt;
    let alt = match guidance.target_alt() {
        Some(target) => {
            let slew = limits.climb_rate_m_s * dt;
            u.position.alt + (target - u.position.alt).clamp(-slew, slew)
        }
        None => u.position.alt,
    };
    let position = Position {
        x: u.position.x + travel * rad.sin(),
        y: u.position.y + travel * rad.cos(),
        alt,
    };

    let captured = guidance.waypoint.is_some_and(|wp| {
        u.position.horizontal_distance(&wp.position) <= limits.capture_radius_m
            || position.horizontal_distance(&wp.position) <= limits.capture_radius_m
    });

    let next = UavState {
        position,
        course,
        speed: u.speed,
        tick: u.tick + 1,
    };
    (next, captured)
}
