use serde::{Deserialize, Serialize};

use crate::{CellCoord, GeoError, GridGeoref, Position};

/// What role a waypoint plays in the mission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaypointKind {
    /// Leg of the original transit route.
    Route,
    /// Leg of the high-altitude survey pattern.
    Search,
    /// The survey exit point outside the area where the re-entry turn begins.
    Turnout,
    /// Leg of the low-altitude acquisition path.
    Acquisition,
    /// Final point of the acquisition path, nearest the resumed route.
    Goal,
}

/// A commanded flight point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub position: Position,
    pub kind: WaypointKind,
    pub index: u32,
}

/// Places a waypoint at a cell's center at the given altitude. The inverse
/// of `position_to_cell` up to the cell's center.
pub fn cell_to_waypoint(
    cell: CellCoord,
    g: &GridGeoref,
    kind: WaypointKind,
    alt: f64,
    index: u32,
) -> Result<Waypoint, GeoError> {
    let center = g.cell_center(cell)?;
    Ok(Waypoint {
        position: Position::new(center.x, center.y, alt)?,
        kind,
        index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn waypoint_sits_at_cell_center() {
        let g = GridGeoref::new(Position::new(100.0, 200.0, 0.0).unwrap(), 600.0, 5, 5).unwrap();
        let w = cell_to_waypoint(CellCoord::new(1, 2), &g, WaypointKind::Acquisition, 60.0, 3)
            .unwrap();
        assert_eq!((w.position.x, w.position.y, w.position.alt), (700.0, 1400.0, 60.0));
        assert_eq!(w.kind, WaypointKind::Acquisition);
        assert_eq!(w.index, 3);
    }

    #[test]
    fn out_of_grid_cell_is_rejected() {
        let g = GridGeoref::new(Position::new(0.0, 0.0, 0.0).unwrap(), 600.0, 5, 5).unwrap();
        assert!(matches!(
            cell_to_waypoint(CellCoord::new(5, 0), &g, WaypointKind::Goal, 60.0, 0),
            Err(GeoError::CellOutOfGrid { .. })
        ));
    }
}
