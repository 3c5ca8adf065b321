use std::fmt;

use serde::{Deserialize, Serialize};

/// A ground argument value. Facts cannot carry variables — groundness is
/// enforced by construction, not checked at runtime.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Sym(String),
    Int(i64),
}

impl Term {
    pub fn sym(s: impl Into<String>) -> Term {
        Term::Sym(s.into())
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self {
            Term::Sym(s) => Some(s),
            Term::Int(_) => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Term::Int(i) => Some(*i),
            Term::Sym(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Sym(s) => f.write_str(s),
            Term::Int(i) => write!(f, "{i}"),
        }
    }
}

/// Who asserted a fact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// Event manager output: detections, telemetry-derived state.
    Sensor,
    /// Derived by forward chaining; wiped and recomputed each inference.
    Reasoner,
    /// Written back by plan execution and solving components.
    Planner,
    /// Loaded from mission configuration at startup.
    MissionPackage,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Sensor => "sensor",
            Source::Reasoner => "reasoner",
            Source::Planner => "planner",
            Source::MissionPackage => "mission-package",
        })
    }
}

/// One stored ground fact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub predicate: String,
    pub args: Vec<Term>,
    /// Simulation tick of the most recent assertion.
    pub tick: u64,
    pub source: Source,
    /// Revision id of the most recent assertion; unique store-wide.
    pub revision: u64,
}

impl Fact {
    /// The (predicate, args) pair that identifies a fact regardless of when
    /// or by whom it was asserted.
    pub fn identity(&self) -> (&str, &[Term]) {
        (&self.predicate, &self.args)
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}
