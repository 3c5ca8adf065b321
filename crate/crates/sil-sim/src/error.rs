use thiserror::Error;

/// Rejections at the simulator boundary. The simulated flight itself never
/// fails — a validated configuration steps deterministically forever — so
/// everything here is either a bad configuration, a bad command, or misuse
/// of the mission log.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    /// A configuration value that cannot describe a flyable scenario.
    #[error("invalid scenario config: {reason}")]
    InvalidConfig { reason: String },

    /// A commanded waypoint outside the scenario bounds.
    #[error("waypoint ({x:.1}, {y:.1}) lies outside the scenario bounds")]
    WaypointOutOfBounds { x: f64, y: f64 },

    /// A commanded altitude the airframe cannot hold.
    #[error("commanded altitude {0} must be finite and non-negative")]
    BadAltitude(f64),

    /// An append that would move the log backwards in time.
    #[error("log tick {tick} precedes the last appended tick {last}")]
    LogNotMonotonic { tick: u64, last: u64 },

    /// An append after the terminal record.
    #[error("the mission log is closed")]
    LogClosed,

    /// A line of a serialized log that does not parse.
    #[error("log line {line}: {reason}")]
    LogParse { line: usize, reason: String },
}
