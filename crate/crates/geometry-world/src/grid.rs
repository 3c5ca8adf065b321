use std::fmt;

use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{GeoError, Position};

/// A survey-grid cell. Serialized compactly as `[col, row]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellCoord {
    pub col: u32,
    pub row: u32,
}

impl CellCoord {
    pub fn new(col: u32, row: u32) -> CellCoord {
        CellCoord { col, row }
    }

    /// Grid (L1) distance between two cells.
    pub fn manhattan(&self, other: &CellCoord) -> u32 {
        self.col.abs_diff(other.col) + self.row.abs_diff(other.row)
    }

    /// The symbol used for this cell in planning problems: `c<col>_<row>`.
    pub fn symbol(&self) -> String {
        format!("c{}_{}", self.col, self.row)
    }

    /// Parses the `c<col>_<row>` symbol form.
    pub fn from_symbol(s: &str) -> Option<CellCoord> {
        let rest = s.strip_prefix('c')?;
        let (col, row) = rest.split_once('_')?;
        Some(CellCoord {
            col: col.parse().ok()?,
            row: row.parse().ok()?,
        })
    }
}

impl fmt::Display for CellCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.col, self.row)
    }
}

impl Serialize for CellCoord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(2)?;
        t.serialize_element(&self.col)?;
        t.serialize_element(&self.row)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for CellCoord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CellVisitor;
        impl<'de> Visitor<'de> for CellVisitor {
            type Value = CellCoord;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a [col, row] pair")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<CellCoord, A::Error> {
                let col = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let row = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                Ok(CellCoord { col, row })
            }
        }
        deserializer.deserialize_tuple(2, CellVisitor)
    }
}

/// Maps grid cells onto the local frame. `origin` is the center of cell
/// (0, 0); columns advance east and rows advance north by `cell_size`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridGeoref {
    pub origin: Position,
    pub cell_size: f64,
    pub cols: u32,
    pub rows: u32,
}

impl GridGeoref {
    pub fn new(origin: Position, cell_size: f64, cols: u32, rows: u32) -> Result<Self, GeoError> {
        if !cell_size.is_finite() || cell_size <= 0.0 {
            return Err(GeoError::NonPositive {
                field: "cell_size",
                value: cell_size,
            });
        }
        if cols == 0 {
            return Err(GeoError::NonPositive {
                field: "cols",
                value: 0.0,
            });
        }
        if rows == 0 {
            return Err(GeoError::NonPositive {
                field: "rows",
                value: 0.0,
            });
        }
        Ok(GridGeoref {
            origin,
            cell_size,
            cols,
            rows,
        })
    }

    /// Center of a cell, at the georef origin's altitude.
    pub fn cell_center(&self, cell: CellCoord) -> Result<Position, GeoError> {
        if cell.col >= self.cols || cell.row >= self.rows {
            return Err(GeoError::CellOutOfGrid {
                col: cell.col,
                row: cell.row,
                cols: self.cols,
                rows: self.rows,
            });
        }
        Ok(Position {
            x: self.origin.x + cell.col as f64 * self.cell_size,
            y: self.origin.y + cell.row as f64 * self.cell_size,
            alt: self.origin.alt,
        })
    }

    /// The georeferenced rectangle: half a cell beyond the outermost
    /// centers on each side. Returns (min_x, min_y, max_x, max_y).
    pub fn extent(&self) -> (f64, f64, f64, f64) {
        let half = self.cell_size / 2.0;
        (
            self.origin.x - half,
            self.origin.y - half,
            self.origin.x + (self.cols - 1) as f64 * self.cell_size + half,
            self.origin.y + (self.rows - 1) as f64 * self.cell_size + half,
        )
    }

    /// Whether a position lies inside the rectangle (edges inclusive).
    pub fn contains(&self, p: &Position) -> bool {
        let (min_x, min_y, max_x, max_y) = self.extent();
        p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y
    }
}

/// Maps a position to the grid cell whose center is nearest. A position
/// exactly halfway between two centers resolves to the smaller index.
/// Positions outside the georeferenced rectangle are an error naming the
/// offending axis.
pub fn position_to_cell(p: &Position, g: &GridGeoref) -> Result<CellCoord, GeoError> {
    let (min_x, min_y, max_x, max_y) = g.extent();
    if p.x < min_x || p.x > max_x {
        return Err(GeoError::OutOfBounds {
            axis: "x",
            value: p.x,
            min: min_x,
            max: max_x,
        });
    }
    if p.y < min_y || p.y > max_y {
        return Err(GeoError::OutOfBounds {
            axis: "y",
            value: p.y,
            min: min_y,
            max: max_y,
        });
    }
    // Round half-down so equidistant positions take the smaller index; the
    // clamp only engages on the exact rectangle edges admitted above.
    let nearest = |t: f64, n: u32| -> u32 {
        let i = (t - 0.5).ceil() as i64;
        i.clamp(0, n as i64 - 1) as u32
    };
    Ok(CellCoord {
        col: nearest((p.x - g.origin.x) / g.cell_size, g.cols),
        row: nearest((p.y - g.origin.y) / g.cell_size, g.rows),
    })
}
