//! The broker: service registry, tick-based request timeouts, per-topic
//! FIFO subscriptions, traffic accounting, and the envelope tap.

use std::cell::RefCell;
use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use serde_json::{json, Value};
use thiserror::Error;

use crate::envelope::{Envelope, Kind};

/// Misuse of the bus API (not message-level failures — those travel as
/// response payloads).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BusError {
    #[error("service '{0}' is already registered")]
    DuplicateService(String),

    #[error("service '{0}' is not registered")]
    NoSuchService(String),

    #[error("correlation id {0} does not match an outstanding request")]
    UnknownCorrelation(u64),
}

/// How a request finished unsuccessfully, as seen by the requester.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RequestError {
    #[error("no service '{service}' is registered")]
    NoSuchService { service: String },

    #[error("handler fault: {message}")]
    HandlerFault { message: String },

    #[error("timed out after {elapsed} ticks")]
    Timeout { elapsed: u64 },
}

/// A handler's verdict on one request.
pub enum HandlerOutcome {
    /// Answer immediately with this payload.
    Reply(Value),
    /// The service will answer later through [`Bus::respond`].
    Deferred,
    /// Fault with a diagnostic; the requester sees a fault response.
    Error(String),
}

type Handler = Box<dyn FnMut(&Envelope) -> HandlerOutcome>;
type Tap = Box<dyn FnMut(&Envelope)>;

/// Receiving end of a topic subscription. Events arrive in publication
/// order; each subscriber owns an independent queue.
#[derive(Clone)]
pub struct Subscription {
    queue: Rc<RefCell<VecDeque<Envelope>>>,
}

impl Subscription {
    pub fn pop(&self) -> Option<Envelope> {
        self.queue.borrow_mut().pop_front()
    }

    pub fn drain(&self) -> Vec<Envelope> {
        self.queue.borrow_mut().drain(..).collect()
    }

    pub fn len(&self) -> usize {
        self.queue.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.borrow().is_empty()
    }
}

/// Per-envelope traffic accounting. `published` counts event envelopes;
/// each is either `delivered` (reached at least one subscriber) or
/// `dropped` (no subscribers at publication time).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BusStats {
    pub published: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub requests: u64,
    pub responses: u64,
    pub timeouts: u64,
}

struct Outstanding {
    service: String,
    issued_tick: u64,
    deadline: u64,
}

/// Single-threaded in-process broker.
#[derive(Default)]
pub struct Bus {
    tick: u64,
    next_msg_id: u64,
    handlers: HashMap<String, Handler>,
    subscribers: HashMap<String, Vec<Rc<RefCell<VecDeque<Envelope>>>>>,
    outstanding: HashMap<u64, Outstanding>,
    results: HashMap<u64, Result<Value, RequestError>>,
    tap: Option<Tap>,
    stats: BusStats,
}

impl Bus {
    pub fn new() -> Bus {
        Bus::default()
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn stats(&self) -> BusStats {
        self.stats
    }

    /// Installs a callback that sees every envelope in creation order —
    /// requests, responses (faults and timeouts included), and events,
    /// dropped ones too.
    pub fn set_tap(&mut self, tap: impl FnMut(&Envelope) + 'static) {
        self.tap = Some(Box::new(tap));
    }

    /// Advances the bus clock and fails every outstanding request whose
    /// deadline has passed, emitting a timeout fault response for each.
    pub fn advance_to(&mut self, tick: u64) {
        self.tick = tick;
        let expired: Vec<u64> = self
            .outstanding
            .iter()
            .filter(|(_, o)| tick >= o.deadline)
            .map(|(&id, _)| id)
            .collect();
        let mut expired = expired;
        expired.sort_unstable(); // issue order == id order: deterministic sweeps
        for id in expired {
            let o = self.outstanding.remove(&id).expect("listed above");
            let elapsed = tick - o.issued_tick;
            self.stats.timeouts += 1;
            let err = RequestError::Timeout { elapsed };
            self.emit_response(&o.service, id, Err(err));
        }
    }

    /// Registers a request handler under a unique service name.
    pub fn register(
        &mut self,
        service: &str,
        handler: impl FnMut(&Envelope) -> HandlerOutcome + 'static,
    ) -> Result<(), BusError> {
        if self.handlers.contains_key(service) {
            return Err(BusError::DuplicateService(service.to_string()));
        }
        self.handlers.insert(service.to_string(), Box::new(handler));
        Ok(())
    }

    pub fn unregister(&mut self, service: &str) -> Result<(), BusError> {
        self.handlers
            .remove(service)
            .map(|_| ())
            .ok_or_else(|| BusError::NoSuchService(service.to_string()))
    }

    /// Sends a request and dispatches it to the service handler before
    /// returning. The returned correlation id is claimed exactly once via
    /// [`Bus::poll_response`]; the caller keeps processing while a deferred
    /// answer or timeout is pending.
    pub fn request(
        &mut self,
        service: &str,
        sender: &str,
        payload: Value,
        timeout_ticks: u64,
    ) -> u64 {
        let env = self.make_envelope(
            None,
            Kind::Request,
            service.to_string(),
            sender.to_string(),
            payload,
        );
        let id = env.msg_id;
        self.stats.requests += 1;

        let mut handler = match self.handlers.remove(service) {
            Some(h) => h,
            None => {
                self.emit_response(
                    service,
                    id,
                    Err(RequestError::NoSuchService {
                        service: service.to_string(),
                    }),
                );
                return id;
            }
        };
        let outcome = handler(&env);
        // Re-insert unless the handler unregistered itself meanwhile —
        // impossible today (handlers cannot reach the bus), kept symmetric
        // anyway.
        self.handlers.entry(service.to_string()).or_insert(handler);

        match outcome {
            HandlerOutcome::Reply(v) => self.emit_response(service, id, Ok(v)),
            HandlerOutcome::Error(message) => {
                self.emit_response(service, id, Err(RequestError::HandlerFault { message }))
            }
            HandlerOutcome::Deferred => {
                self.outstanding.insert(
                    id,
                    Outstanding {
                        service: service.to_string(),
                        issued_tick: self.tick,
                        deadline: self.tick + timeout_ticks,
                    },
                );
            }
        }
        id
    }

    /// Completes a deferred request. Only an outstanding correlation id may
    /// be answered — exactly-once by construction.
    pub fn respond(
        &mut self,
        correlation_id: u64,
        result: Result<Value, String>,
    ) -> Result<(), BusError> {
        let o = self
            .outstanding
            .remove(&correlation_id)
            .ok_or(BusError::UnknownCorrelation(correlation_id))?;
        let result = result.map_err(|message| RequestError::HandlerFault { message });
        self.emit_response(&o.service, correlation_id, result);
        Ok(())
    }

    /// Claims the result for a correlation id, once. `None` while pending.
    pub fn poll_response(&mut self, correlation_id: u64) -> Option<Result<Value, RequestError>> {
        self.results.remove(&correlation_id)
    }

    /// Subscribes to a topic; events published afterwards land in the
    /// returned queue in publication order.
    pub fn subscribe(&mut self, topic: &str) -> Subscription {
        let queue = Rc::new(RefCell::new(VecDeque::new()));
        self.subscribers
            .entry(topic.to_string())
            .or_default()
            .push(Rc::clone(&queue));
        Subscription { queue }
    }

    /// Publishes an event. With no subscribers the envelope is dropped and
    /// counted; it still passes the tap.
    pub fn publish(&mut self, topic: &str, sender: &str, payload: Value) {
        let env = self.make_envelope(
            None,
            Kind::Event,
            topic.to_string(),
            sender.to_string(),
            payload,
        );
        self.stats.published += 1;
        match self.subscribers.get(topic) {
            Some(queues) if !queues.is_empty() => {
                self.stats.delivered += 1;
                for q in queues {
                    q.borrow_mut().push_back(env.clone());
                }
            }
            _ => self.stats.dropped += 1,
        }
    }

    fn emit_response(&mut self, service: &str, correlation_id: u64, result: Result<Value, RequestError>) {
        let payload = match &result {
            Ok(v) => v.clone(),
            Err(e) => json!({ "error": { "kind": error_kind(e), "message": e.to_string() } }),
        };
        let _ = self.make_envelope(
            Some(correlation_id),
            Kind::Response,
            service.to_string(),
            service.to_string(),
            payload,
        );
        self.stats.responses += 1;
        self.results.insert(correlation_id, result);
    }

    fn make_envelope(
        &mut self,
        correlation_id: Option<u64>,
        kind: Kind,
        channel: String,
        sender: String,
        payload: Value,
    ) -> Envelope {
        self.next_msg_id += 1;
        let env = Envelope {
            msg_id: self.next_msg_id,
            correlation_id,
            kind,
            channel,
            sender,
            payload,
            tick: self.tick,
        };
        if let Some(tap) = &mut self.tap {
            tap(&env);
        }
        env
    }
}

fn error_kind(e: &RequestError) -> &'static str {
    match e {
        RequestError::NoSuchService { .. } => "no-such-service",
        RequestError::HandlerFault { .. } => "handler-fault",
        RequestError::Timeout { .. } => "timeout",
    }
}
