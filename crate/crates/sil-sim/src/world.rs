use geometry_world::Position;
use serde::{Deserialize, Serialize};

use crate::error::SimError;

/// Axis-aligned horizontal extent of the scenario. Everything the mission
/// touches — entities and commanded waypoints — must lie inside it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Bounds {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Bounds {
    /// Whether the point lies inside (edges included). Altitude is not
    /// bounded — the scenario is planar with a free vertical axis.
    pub fn contains(&self, p: &Position) -> bool {
        self.min_x <= p.x && p.x <= self.max_x && self.min_y <= p.y && p.y <= self.max_y
    }

    fn check(&self) -> Result<(), SimError> {
        for (name, v) in [
            ("min-x", self.min_x),
            ("min-y", self.min_y),
            ("max-x", self.max_x),
            ("max-y", self.max_y),
        ] {
            if !v.is_finite() {
                return Err(SimError::InvalidConfig {
                    reason: format!("bounds {name} is not finite"),
                });
            }
        }
        if self.min_x >= self.max_x || self.min_y >= self.max_y {
            return Err(SimError::InvalidConfig {
                reason: "bounds must span a positive area".into(),
            });
        }
        Ok(())
    }
}

/// A ground target at a fixed position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TargetTruth {
    pub x: f64,
    pub y: f64,
    /// First tick at which the sensor may report this entity. Zero (the
    /// default) means detectable from the start; a positive value delays
    /// the first sighting without introducing any randomness.
    #[serde(default)]
    pub detect_after: u64,
}

impl TargetTruth {
    pub fn position(&self) -> Position {
        Position {
            x: self.x,
            y: self.y,
            alt: 0.0,
        }
    }
}

/// A circular threat zone on the ground. The zone is what the vehicle can
/// *encounter* (by entering the radius); the sensor reports the zone center
/// like any other entity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ThreatZone {
    pub x: f64,
    pub y: f64,
    /// Zone radius in meters; must be positive.
    pub radius: f64,
    /// See [`TargetTruth::detect_after`].
    #[serde(default)]
    pub detect_after: u64,
}

impl ThreatZone {
    pub fn center(&self) -> Position {
        Position {
            x: self.x,
            y: self.y,
            alt: 0.0,
        }
    }

    /// Whether a position is inside the zone (boundary included).
    pub fn contains(&self, p: &Position) -> bool {
        self.center().horizontal_distance(p) <= self.radius
    }
}

/// Ground truth the simulator flies against: the playable bounds and every
/// target and threat that exists, whether or not anything has sensed it yet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct WorldTruth {
    pub bounds: Bounds,
    #[serde(default)]
    pub targets: Vec<TargetTruth>,
    #[serde(default)]
    pub threats: Vec<ThreatZone>,
}

impl WorldTruth {
    /// Rejects worlds that cannot be meant: non-finite or inverted bounds,
    /// entities placed outside them, or degenerate threat radii.
    pub fn check(&self) -> Result<(), SimError> {
        self.bounds.check()?;
        for (i, t) in self.targets.iter().enumerate() {
            if !t.x.is_finite() || !t.y.is_finite() {
                return Err(SimError::InvalidConfig {
                    reason: format!("target {i} has a non-finite coordinate"),
                });
            }
            if !self.bounds.contains(&t.position()) {
                return Err(SimError::InvalidConfig {
                    reason: format!("target {i} lies outside the scenario bounds"),
                });
            }
        }
        for (i, z) in self.threats.iter().enumerate() {
            if !z.x.is_finite() || !z.y.is_finite() || !z.radius.is_finite() {
                return Err(SimError::InvalidConfig {
                    reason: format!("threat {i} has a non-finite field"),
                });
            }
            if z.radius <= 0.0 {
                return Err(SimError::InvalidConfig {
                    reason: format!("threat {i} radius must be positive"),
                });
            }
            if !self.bounds.contains(&z.center()) {
                return Err(SimError::InvalidConfig {
                    reason: format!("threat {i} center lies outside the scenario bounds"),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds() -> Bounds {
        Bounds {
            min_x: -1000.0,
            min_y: -1000.0,
            max_x: 1000.0,
            max_y: 1000.0,
        }
    }

    #[test]
    fn valid_world_passes() {
        let w = WorldTruth {
            bounds: bounds(),
            targets: vec![TargetTruth {
                x: 100.0,
                y: 200.0,
                detect_after: 0,
            }],
            threats: vec![ThreatZone {
                x: -300.0,
                y: 0.0,
                radius: 150.0,
                detect_after: 0,
            }],
        };
        w.check().unwrap();
    }

    #[test]
    fn zero_radius_threat_is_rejected() {
        let w = WorldTruth {
            bounds: bounds(),
            targets: vec![],
            threats: vec![ThreatZone {
                x: 0.0,
                y: 0.0,
                radius: 0.0,
                detect_after: 0,
            }],
        };
        assert!(matches!(w.check(), Err(SimError::InvalidConfig { .. })));
    }

    #[test]
    fn out_of_bounds_target_is_rejected() {
        let w = WorldTruth {
            bounds: bounds(),
            targets: vec![TargetTruth {
                x: 5000.0,
                y: 0.0,
                detect_after: 0,
            }],
            threats: vec![],
        };
        assert!(matches!(w.check(), Err(SimError::InvalidConfig { .. })));
    }

    #[test]
    fn inverted_bounds_are_rejected() {
        let w = WorldTruth {
            bounds: Bounds {
                min_x: 10.0,
                min_y: 0.0,
                max_x: -10.0,
                max_y: 100.0,
            },
            targets: vec![],
            threats: vec![],
        };
        assert!(matches!(w.check(), Err(SimError::InvalidConfig { .. })));
    }

    #[test]
    fn zone_boundary_counts_as_inside() {
        let z = ThreatZone {
            x: 0.0,
            y: 0.0,
            radius: 100.0,
            detect_after: 0,
        };
        assert!(z.contains(&Position::new(100.0, 0.0, 50.0).unwrap()));
        assert!(!z.contains(&Position::new(100.1, 0.0, 50.0).unwrap()));
    }
}
