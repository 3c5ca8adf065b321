use thiserror::Error;

/// Parse diagnostics. Every variant carries the 1-based line and column of
/// the offending input so tooling can point at it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    /// The input contains a character or token no rule admits.
    #[error("lexical error at {line}:{col}: {message}")]
    Lexical {
        line: u32,
        col: u32,
        message: String,
    },

    /// The token stream does not fit the grammar. `expected` lists the
    /// token classes that would have been accepted at this point.
    #[error("syntax error at {line}:{col}: {message} (expected {})", expected.join(" | "))]
    Syntax {
        line: u32,
        col: u32,
        message: String,
        expected: Vec<&'static str>,
    },

    /// The input is grammatical but violates a declaration or typing rule.
    #[error("semantic error at {line}:{col}: {message}")]
    Semantic {
        line: u32,
        col: u32,
        message: String,
    },
}

impl ParseError {
    /// Coarse class name, used by diagnostics tests and reports.
    pub fn class(&self) -> &'static str {
        match self {
            ParseError::Lexical { .. } => "lexical",
            ParseError::Syntax { .. } => "syntax",
            ParseError::Semantic { .. } => "semantic",
        }
    }
}

/// Errors from grounding a (domain, problem) pair.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundError {
    /// The problem names a different domain than the one supplied.
    #[error("problem references domain '{found}' but grounding ran against '{expected}'")]
    DomainMismatch { expected: String, found: String },

    /// Instantiation exceeded the grounded-action cap.
    #[error("grounded action count exceeds cap of {cap}")]
    TooManyActions { cap: usize },

    /// A precondition negates a predicate some effect modifies. The parser
    /// rejects this in source text; it can only reach grounding through a
    /// hand-built syntax tree.
    #[error("action '{action}' negates dynamic predicate '{predicate}' in its precondition")]
    NegatedDynamicPrecondition { action: String, predicate: String },
}
