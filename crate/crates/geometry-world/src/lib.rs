//! Shared geometric and world-model types for the autonomy stack.
//!
//! Everything lives in a planar local frame: `x` meters east, `y` meters
//! north of the scenario origin, altitude in meters above ground. Grid
//! coordinates georeference survey cells onto that frame.

mod error;
mod grid;
mod heading;
mod map;
mod position;
mod waypoint;

pub use error::GeoError;
pub use grid::{position_to_cell, CellCoord, GridGeoref};
pub use heading::{angle_diff, bearing, normalize_course, Heading, TurnDir};
pub use map::{CellMarkers, SituationalMap};
pub use position::Position;
pub use waypoint::{cell_to_waypoint, Waypoint, WaypointKind};
