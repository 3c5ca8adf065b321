use thiserror::Error;

/// Errors produced by geometric lookups and constructors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    /// A position coordinate fell outside the georeferenced rectangle.
    /// Names the offending axis so callers can report which bound failed.
    #[error("{axis} = {value} outside grid extent [{min}, {max}]")]
    OutOfBounds {
        axis: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// A cell index fell outside the grid.
    #[error("cell ({col}, {row}) outside {cols}x{rows} grid")]
    CellOutOfGrid {
        col: u32,
        row: u32,
        cols: u32,
        rows: u32,
    },

    /// A coordinate was NaN or infinite.
    #[error("{field} must be finite, got {value}")]
    NonFinite { field: &'static str, value: f64 },

    /// Altitude below ground.
    #[error("altitude must be >= 0, got {0}")]
    NegativeAltitude(f64),

    /// A grid parameter that must be positive was not.
    #[error("{field} must be positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
}
