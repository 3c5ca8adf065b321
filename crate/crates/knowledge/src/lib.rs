//! Knowledge store and context reasoner.
//!
//! The store holds ground facts — predicate plus symbol/integer arguments —
//! tagged with the simulation tick and the source that asserted them. A
//! forward-chaining reasoner derives higher-level context facts from
//! positive-conjunction rules; derived facts are recomputed from scratch on
//! every inference call, which keeps truth maintenance trivial.
//!
//! The store is single-writer by design: one owner mutates it, and everyone
//! else works from immutable [`KnowledgeSnapshot`] copies.

mod error;
mod fact;
mod pattern;
mod rules;
mod store;

pub use error::KsError;
pub use fact::{Fact, Source, Term};
pub use pattern::{Binding, PatTerm, Pattern};
pub use rules::{parse_rules, Rule};
pub use store::{KnowledgeSnapshot, KnowledgeStore, INFER_ROUND_CAP};
