use knowledge::KsError;
use pddl_core::ParseError;
use sil_sim::SimError;
use thiserror::Error;

/// Everything that can go wrong while loading a mission package or running
/// the task-coordination cycle.
#[derive(Debug, Error)]
pub enum AtcError {
    /// Lexical or syntactic trouble in a package file; the wrapped error
    /// carries line and column.
    #[error("{file}: {source}")]
    Parse {
        file: String,
        #[source]
        source: ParseError,
    },

    /// A package file parsed but says something inconsistent: duplicate
    /// names, undeclared or misused predicates, unbindable variables.
    #[error("{file}:{line}: {message}")]
    Package {
        file: String,
        line: u32,
        message: String,
    },

    /// A package without plans cannot coordinate anything.
    #[error("a mission package needs at least one plan")]
    EmptyPackage,

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A subscribed envelope whose payload does not decode. These come
    /// from in-process peers, so a bad payload is a wiring bug, not an
    /// environmental condition.
    #[error("bad envelope on '{topic}': {reason}")]
    BadEnvelope { topic: String, reason: String },

    /// A second grid-frame installation would silently reframe every map
    /// mark made so far.
    #[error("grid frame already installed")]
    GridAlreadyInstalled,

    /// The planning service answered with something unusable.
    #[error("planner exchange: {reason}")]
    Planner { reason: String },

    #[error(transparent)]
    Knowledge(#[from] KsError),

    #[error("mission log: {0}")]
    Log(#[from] SimError),
}
