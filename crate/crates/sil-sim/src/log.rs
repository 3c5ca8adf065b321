use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::SimError;

/// Log kind of the terminal record of a successful mission.
pub const MISSION_COMPLETE: &str = "mission-complete";
/// Log kind of the terminal record of a failed mission.
pub const MISSION_FAILED: &str = "mission-failed";

/// One mission-log line: when, what kind of thing happened, and its payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub tick: u64,
    pub kind: String,
    pub payload: Value,
}

/// The append-only record of everything observable about a mission:
/// telemetry, detections, commands, plan transitions, bus traffic —
/// whatever the participants choose to log, in time order. The log is the
/// single source for post-hoc metrics, so appends are monotone in tick and
/// a closed log (one that has its terminal mission-complete or
/// mission-failed record) accepts nothing further.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MissionLog {
    records: Vec<LogRecord>,
    closed: bool,
}

impl MissionLog {
    pub fn new() -> MissionLog {
        MissionLog::default()
    }

    pub fn records(&self) -> &[LogRecord] {
        &self.records
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Last appended tick, or zero for an empty log.
    pub fn last_tick(&self) -> u64 {
        self.records.last().map_or(0, |r| r.tick)
    }

    /// Appends one record. Ticks must not decrease and the log must still
    /// be open.
    pub fn append(&mut self, tick: u64, kind: &str, payload: Value) -> Result<(), SimError> {
        if self.closed {
            return Err(SimError::LogClosed);
        }
        let last = self.last_tick();
        if tick < last {
            return Err(SimError::LogNotMonotonic { tick, last });
        }
        self.records.push(LogRecord {
            tick,
            kind: kind.to_string(),
            payload,
        });
        Ok(())
    }

    /// Appends the terminal record and seals the log. `kind` must be one of
    /// the two terminal kinds.
    pub fn close(&mut self, tick: u64, kind: &str, payload: Value) -> Result<(), SimError> {
        if kind != MISSION_COMPLETE && kind != MISSION_FAILED {
            return Err(SimError::InvalidConfig {
                reason: format!("'{kind}' is not a terminal log kind"),
            });
        }
        self.append(tick, kind, payload)?;
        self.closed = true;
        Ok(())
    }

    /// All records of one kind, in order.
    pub fn of_kind<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a LogRecord> {
        self.records.iter().filter(move |r| r.kind == kind)
    }

    /// Serializes to line-delimited JSON, one record per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("log records are plain data"));
            out.push('\n');
        }
        out
    }

    /// Parses a line-delimited log, re-validating tick order. The log comes
    /// back closed exactly when its last record is terminal.
    pub fn from_jsonl(text: &str) -> Result<MissionLog, SimError> {
        let mut log = MissionLog::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: LogRecord = serde_json::from_str(line).map_err(|e| SimError::LogParse {
                line: i + 1,
                reason: e.to_string(),
            })?;
            log.append(rec.tick, &rec.kind, rec.payload)
                .map_err(|e| SimError::LogParse {
                    line: i + 1,
                    reason: e.to_string(),
                })?;
        }
        log.closed = log
            .records
            .last()
            .is_some_and(|r| r.kind == MISSION_COMPLETE || r.kind == MISSION_FAILED);
        Ok(log)
    }
}
