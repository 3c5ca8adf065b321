use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{CellCoord, GeoError, GridGeoref};

/// Markers accumulated for one cell, each with the tick it was first learned.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CellMarkers {
    pub threat: Option<u64>,
    pub target: Option<u64>,
    pub scanned: Option<u64>,
}

/// The internal picture of the surveyed area: a georeferenced grid with
/// per-cell threat / target / scanned markers. Markers only accumulate;
/// in particular the scanned set never shrinks during a mission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "MapWire", into = "MapWire")]
pub struct SituationalMap {
    georef: GridGeoref,
    markers: BTreeMap<CellCoord, CellMarkers>,
}

impl SituationalMap {
    pub fn new(georef: GridGeoref) -> SituationalMap {
        SituationalMap {
            georef,
            markers: BTreeMap::new(),
        }
    }

    pub fn georef(&self) -> &GridGeoref {
        &self.georef
    }

    fn entry(&mut self, cell: CellCoord) -> Result<&mut CellMarkers, GeoError> {
        if cell.col >= self.georef.cols || cell.row >= self.georef.rows {
            return Err(GeoError::CellOutOfGrid {
                col: cell.col,
                row: cell.row,
                cols: self.georef.cols,
                rows: self.georef.rows,
            });
        }
        Ok(self.markers.entry(cell).or_default())
    }

    /// Marks a threat cell; keeps the tick of the first sighting.
    pub fn mark_threat(&mut self, cell: CellCoord, tick: u64) -> Result<(), GeoError> {
        let m = self.entry(cell)?;
        m.threat.get_or_insert(tick);
        Ok(())
    }

    /// Marks a target cell; keeps the tick of the first sighting.
    pub fn mark_target(&mut self, cell: CellCoord, tick: u64) -> Result<(), GeoError> {
        let m = self.entry(cell)?;
        m.target.get_or_insert(tick);
        Ok(())
    }

    /// Marks a cell as scanned; keeps the tick of the first scan. There is
    /// deliberately no way to unmark.
    pub fn mark_scanned(&mut self, cell: CellCoord, tick: u64) -> Result<(), GeoError> {
        let m = self.entry(cell)?;
        m.scanned.get_or_insert(tick);
        Ok(())
    }

    pub fn markers(&self, cell: CellCoord) -> Option<&CellMarkers> {
        self.markers.get(&cell)
    }

    pub fn is_threat(&self, cell: CellCoord) -> bool {
        self.markers.get(&cell).is_some_and(|m| m.threat.is_some())
    }

    pub fn is_scanned(&self, cell: CellCoord) -> bool {
        self.markers.get(&cell).is_some_and(|m| m.scanned.is_some())
    }

    /// Threat cells in ascending (col, row) order.
    pub fn threat_cells(&self) -> Vec<CellCoord> {
        self.cells_where(|m| m.threat.is_some())
    }

    /// Target cells in ascending (col, row) order.
    pub fn target_cells(&self) -> Vec<CellCoord> {
        self.cells_where(|m| m.target.is_some())
    }

    /// Scanned cells in ascending (col, row) order.
    pub fn scanned_cells(&self) -> Vec<CellCoord> {
        self.cells_where(|m| m.scanned.is_some())
    }

    fn cells_where(&self, pred: impl Fn(&CellMarkers) -> bool) -> Vec<CellCoord> {
        self.markers
            .iter()
            .filter(|(_, m)| pred(m))
            .map(|(c, _)| *c)
            .collect()
    }
}

/// Serialized form: sorted `(cell, markers)` entries, since tuple-keyed
/// maps do not survive text serialization.
#[derive(Serialize, Deserialize)]
struct MapWire {
    georef: GridGeoref,
    cells: Vec<(CellCoord, CellMarkers)>,
}

impl From<SituationalMap> for MapWire {
    fn from(m: SituationalMap) -> MapWire {
        MapWire {
            georef: m.georef,
            cells: m.markers.into_iter().collect(),
        }
    }
}

impl From<MapWire> for SituationalMap {
    fn from(w: MapWire) -> SituationalMap {
        SituationalMap {
            georef: w.georef,
            markers: w.cells.into_iter().collect(),
        }
    }
}
