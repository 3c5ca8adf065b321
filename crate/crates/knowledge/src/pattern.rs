//! Fact patterns: predicate plus a mix of constants and variables, matched
//! against stored facts by unification.

use std::collections::BTreeMap;
use std::fmt;

use pddl_core::lexer::{lex, Token, TokenKind};
use pddl_core::ParseError;

use crate::fact::{Fact, Term};

/// One pattern argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatTerm {
    /// Named variable; repeated occurrences must bind equal values.
    Var(String),
    Sym(String),
    Int(i64),
}

impl PatTerm {
    pub fn var(name: impl Into<String>) -> PatTerm {
        PatTerm::Var(name.into())
    }

    pub fn sym(name: impl Into<String>) -> PatTerm {
        PatTerm::Sym(name.into())
    }
}

/// Variable bindings accumulated while matching, keyed by variable name.
pub type Binding = BTreeMap<String, Term>;

/// A single fact pattern, e.g. `(detected-threat ?c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub predicate: String,
    pub args: Vec<PatTerm>,
}

impl Pattern {
    pub fn new(predicate: impl Into<String>, args: Vec<PatTerm>) -> Pattern {
        Pattern {
            predicate: predicate.into(),
            args,
        }
    }

    /// Parses one `(predicate arg*)` s-expression, where arguments are
    /// symbols, integers, or `?variables`.
    pub fn parse(text: &str) -> Result<Pattern, ParseError> {
        let tokens = lex(text)?;
        let mut cur = Cursor::new(&tokens);
        let p = cur.pattern()?;
        cur.expect_end()?;
        Ok(p)
    }

    /// Variable names appearing in this pattern, in argument order.
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|a| match a {
            PatTerm::Var(v) => Some(v.as_str()),
            _ => None,
        })
    }

    /// Attempts to extend `binding` so this pattern equals `fact`.
    pub fn unify(&self, fact: &Fact, binding: &Binding) -> Option<Binding> {
        if self.predicate != fact.predicate || self.args.len() != fact.args.len() {
            return None;
        }
        let mut out = binding.clone();
        for (pat, val) in self.args.iter().zip(&fact.args) {
            match pat {
                PatTerm::Sym(s) => {
                    if fact_sym(val) != Some(s.as_str()) {
                        return None;
                    }
                }
                PatTerm::Int(i) => {
                    if val != &Term::Int(*i) {
                        return None;
                    }
                }
                PatTerm::Var(v) => match out.get(v) {
                    Some(bound) if bound != val => return None,
                    Some(_) => {}
                    None => {
                        out.insert(v.clone(), val.clone());
                    }
                },
            }
        }
        Some(out)
    }

    /// Instantiates the pattern under a binding covering all its variables.
    pub fn instantiate(&self, binding: &Binding) -> Option<(String, Vec<Term>)> {
        let mut args = Vec::with_capacity(self.args.len());
        for a in &self.args {
            args.push(match a {
                PatTerm::Sym(s) => Term::Sym(s.clone()),
                PatTerm::Int(i) => Term::Int(*i),
                PatTerm::Var(v) => binding.get(v)?.clone(),
            });
        }
        Some((self.predicate.clone(), args))
    }
}

fn fact_sym(t: &Term) -> Option<&str> {
    match t {
        Term::Sym(s) => Some(s),
        Term::Int(_) => None,
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            match a {
                PatTerm::Var(v) => write!(f, " ?{v}")?,
                PatTerm::Sym(s) => write!(f, " {s}")?,
                PatTerm::Int(i) => write!(f, " {i}")?,
            }
        }
        f.write_str(")")
    }
}

/// Minimal token cursor shared with the rule-file parser.
pub(crate) struct Cursor<'t> {
    toks: &'t [Token],
    pos: usize,
}

impl<'t> Cursor<'t> {
    pub(crate) fn new(toks: &'t [Token]) -> Cursor<'t> {
        Cursor { toks, pos: 0 }
    }

    pub(crate) fn here(&self) -> (u32, u32) {
        match self.toks.get(self.pos) {
            Some(t) => (t.line, t.col),
            None => self
                .toks
                .last()
                .map(|t| (t.line, t.col + 1))
                .unwrap_or((1, 1)),
        }
    }

    pub(crate) fn syntax(&self, message: impl Into<String>, expected: Vec<&'static str>) -> ParseError {
        let (line, col) = self.here();
        ParseError::Syntax {
            line,
            col,
            message: message.into(),
            expected,
        }
    }

    pub(crate) fn describe_next(&self) -> String {
        match self.toks.get(self.pos) {
            Some(t) => format!("found {}", t.kind.describe()),
            None => "found end of input".to_string(),
        }
    }

    pub(crate) fn peek(&self) -> Option<&TokenKind> {
        self.toks.get(self.pos).map(|t| &t.kind)
    }

    pub(crate) fn bump(&mut self) -> Option<&'t Token> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn expect_lparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(TokenKind::LParen) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.syntax(self.describe_next(), vec!["'('"])),
        }
    }

    pub(crate) fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(TokenKind::RParen) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.syntax(self.describe_next(), vec!["')'"])),
        }
    }

    pub(crate) fn expect_symbol(&mut self, what: &'static str) -> Result<String, ParseError> {
        match self.peek() {
            Some(TokenKind::Symbol(_)) => {
                let Some(Token {
                    kind: TokenKind::Symbol(s),
                    ..
                }) = self.bump()
                else {
                    unreachable!()
                };
                Ok(s.clone())
            }
            _ => Err(self.syntax(self.describe_next(), vec![what])),
        }
    }

    pub(crate) fn expect_keyword(&mut self, name: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(TokenKind::Keyword(k)) if k == name => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.syntax(self.describe_next(), vec![name])),
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos == self.toks.len()
    }

    pub(crate) fn expect_end(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.syntax(
                format!("trailing input, {}", self.describe_next()),
                vec!["end of input"],
            ))
        }
    }

    /// Parses `(predicate arg*)`.
    pub(crate) fn pattern(&mut self) -> Result<Pattern, ParseError> {
        self.expect_lparen()?;
        let predicate = self.expect_symbol("predicate name")?;
        let mut args = Vec::new();
        loop {
            match self.peek() {
                Some(TokenKind::RParen) => {
                    self.pos += 1;
                    return Ok(Pattern { predicate, args });
                }
                Some(TokenKind::Symbol(_)) => {
                    let Some(Token {
                        kind: TokenKind::Symbol(s),
                        ..
                    }) = self.bump()
                    else {
                        unreachable!()
                    };
                    args.push(PatTerm::Sym(s.clone()));
                }
                Some(TokenKind::Variable(_)) => {
                    let Some(Token {
                        kind: TokenKind::Variable(v),
                        ..
                    }) = self.bump()
                    else {
                        unreachable!()
                    };
                    args.push(PatTerm::Var(v.clone()));
                }
                Some(TokenKind::Integer(_)) => {
                    let Some(Token {
                        kind: TokenKind::Integer(i),
                        ..
                    }) = self.bump()
                    else {
                        unreachable!()
                    };
                    args.push(PatTerm::Int(*i));
                }
                _ => {
                    return Err(self.syntax(
                        self.describe_next(),
                        vec!["name", "variable", "integer", "')'"],
                    ))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fact::Source;

    fn fact(predicate: &str, args: Vec<Term>) -> Fact {
        Fact {
            predicate: predicate.into(),
            args,
            tick: 0,
            source: Source::Sensor,
            revision: 1,
        }
    }

    #[test]
    fn parse_round_trips_through_display() {
        let p = Pattern::parse("(dp-waypoint ?i ?c acquisition)").unwrap();
        assert_eq!(p.to_string(), "(dp-waypoint ?i ?c acquisition)");
        let q = Pattern::parse("(dp-plan-cost 12)").unwrap();
        assert_eq!(q.args, vec![PatTerm::Int(12)]);
    }

    #[test]
    fn repeated_variables_require_equal_arguments() {
        let p = Pattern::parse("(pair ?x ?x)").unwrap();
        let equal = fact("pair", vec![Term::sym("a"), Term::sym("a")]);
        let mixed = fact("pair", vec![Term::sym("a"), Term::sym("b")]);
        assert!(p.unify(&equal, &Binding::new()).is_some());
        assert!(p.unify(&mixed, &Binding::new()).is_none());
    }

    #[test]
    fn unify_respects_existing_bindings() {
        let p = Pattern::parse("(at ?c)").unwrap();
        let f = fact("at", vec![Term::sym("c1_2")]);
        let mut pre = Binding::new();
        pre.insert("c".into(), Term::sym("c9_9"));
        assert!(p.unify(&f, &pre).is_none());
        pre.insert("c".into(), Term::sym("c1_2"));
        assert!(p.unify(&f, &pre).is_some());
    }

    #[test]
    fn symbols_do_not_match_integers() {
        let p = Pattern::parse("(cost 3)").unwrap();
        assert!(p
            .unify(&fact("cost", vec![Term::Int(3)]), &Binding::new())
            .is_some());
        assert!(p
            .unify(&fact("cost", vec![Term::sym("3x")]), &Binding::new())
            .is_none());
    }
}
