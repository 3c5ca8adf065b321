//! In-process message fabric with request–response services and topic
//! publication.
//!
//! The broker is deliberately single-threaded: handlers run one at a time in
//! dispatch order, timeouts are measured in simulation ticks, and every
//! envelope passes through an optional tap in creation order — which is what
//! makes full bus traffic reconstructable from a mission log and runs
//! bit-reproducible. The envelope schema matches the length-prefixed wire
//! form in [`wire`], so swapping the in-process broker for a socket
//! transport changes plumbing, not protocol.

mod bus;
mod envelope;
pub mod wire;

pub use bus::{Bus, BusError, BusStats, HandlerOutcome, RequestError, Subscription};
pub use envelope::{Envelope, Kind};
