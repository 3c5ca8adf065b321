use serde::{Deserialize, Serialize};

use crate::GeoError;

/// A point in the planar local frame: meters east (`x`), meters north (`y`),
/// meters above ground (`alt`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub alt: f64,
}

impl Position {
    /// Builds a position, rejecting non-finite coordinates and negative altitude.
    pub fn new(x: f64, y: f64, alt: f64) -> Result<Self, GeoError> {
        for (field, value) in [("x", x), ("y", y), ("alt", alt)] {
            if !value.is_finite() {
                return Err(GeoError::NonFinite { field, value });
            }
        }
        if alt < 0.0 {
            return Err(GeoError::NegativeAltitude(alt));
        }
        Ok(Position { x, y, alt })
    }

    /// Horizontal (ground-plane) distance to `other`, ignoring altitude.
    pub fn horizontal_distance(&self, other: &Position) -> f64 {
        let dx = other.x - self.x;
        let dy = other.y - self.y;
        (dx * dx + dy * dy).sqrt()
    }

    /// Same point at a different altitude.
    pub fn with_alt(&self, alt: f64) -> Position {
        Position { alt, ..*self }
    }
}
