use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Message role on the bus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Request,
    Response,
    Event,
}

/// One bus message. `channel` is the service name for requests/responses
/// and the topic for events.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    /// Unique per run, assigned in creation order.
    pub msg_id: u64,
    /// For responses: the msg id of the request being answered.
    pub correlation_id: Option<u64>,
    pub kind: Kind,
    pub channel: String,
    pub sender: String,
    pub payload: Value,
    /// Simulation tick at creation.
    pub tick: u64,
}
