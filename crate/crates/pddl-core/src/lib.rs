//! Typed STRIPS planning language: parsing, grounding, states, and plan
//! validation.
//!
//! The accepted language is a deliberately small subset — flat types,
//! conjunctive conditions, delete-list effects, integer action costs via a
//! `(:action-cost n)` element — documented in `docs/formats.md` at the
//! workspace root. Negative precondition literals are admitted only on
//! static predicates, which grounding compiles away.

pub mod ast;
mod error;
mod ground;
pub mod lexer;
mod parser;
mod printer;
mod validate;

pub use ast::{ActionSchema, Atom, Domain, GroundAtom, Literal, Problem, Term};
pub use error::{GroundError, ParseError};
pub use ground::{
    ground, ground_with_cap, GroundedAction, GroundedTask, State, DEFAULT_ACTION_CAP,
};
pub use parser::{parse_domain, parse_problem};
pub use printer::{print_domain, print_problem};
pub use validate::{parse_plan, validate_plan, Plan, ValidationReport};
