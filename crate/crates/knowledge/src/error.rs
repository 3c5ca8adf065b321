use thiserror::Error;

/// Errors from store mutation and inference.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KsError {
    /// The store's clock only moves forward.
    #[error("tick must not regress: store is at {current}, got {requested}")]
    TickRegression { current: u64, requested: u64 },

    /// A rule head uses a variable its body never binds.
    #[error("rule '{rule}' is not range-restricted: head variable '?{variable}' unbound in body")]
    UnboundHeadVariable { rule: String, variable: String },

    /// Forward chaining exceeded the round cap. Unreachable for
    /// range-restricted positive rules (no new constants can appear), kept
    /// as a hard stop against future rule-language growth.
    #[error("inference did not reach a fixpoint within {cap} rounds")]
    DivergentRules { cap: usize },
}
