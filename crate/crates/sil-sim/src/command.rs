use geometry_world::Waypoint;
use serde::{Deserialize, Serialize};

use crate::sensor::GimbalSector;

/// A concrete flight or sensor command, the only way anything outside the
/// simulator influences the flight. Commands take effect immediately on
/// submission and govern every following tick:
///
/// - `GotoWaypoint` replaces the pursued waypoint (and clears any standing
///   altitude override — the waypoint's own altitude becomes the vertical
///   target).
/// - `SetAltitude` overrides the vertical target until the next waypoint.
/// - `GimbalSector` re-aims the sensor; the aim persists until changed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Command {
    GotoWaypoint { waypoint: Waypoint },
    SetAltitude { alt_m: f64 },
    GimbalSector { sector: GimbalSector },
}
