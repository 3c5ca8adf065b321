//! Inference rules and the mission-package rule-file parser.
//!
//! Rule files reuse the planning language's s-expression lexer; each rule is
//!
//! ```text
//! (rule <name>
//!   :when (and <pattern>*)      ; or a single pattern
//!   :derive <pattern>)
//! ```
//!
//! Bodies are conjunctions of positive patterns. Heads may only use
//! variables the body binds (range restriction), checked at construction.

use std::collections::HashSet;

use pddl_core::lexer::{lex, TokenKind};
use pddl_core::ParseError;

use crate::error::KsError;
use crate::pattern::{Cursor, Pattern};

/// A forward-chaining rule: when every body pattern matches (sharing one
/// binding), derive the instantiated head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub body: Vec<Pattern>,
    pub head: Pattern,
}

impl Rule {
    /// Builds a rule, rejecting heads with variables the body never binds.
    pub fn new(name: impl Into<String>, body: Vec<Pattern>, head: Pattern) -> Result<Rule, KsError> {
        let name = name.into();
        let bound: HashSet<&str> = body.iter().flat_map(|p| p.variables()).collect();
        if let Some(unbound) = head.variables().find(|v| !bound.contains(v)) {
            return Err(KsError::UnboundHeadVariable {
                rule: name,
                variable: unbound.to_string(),
            });
        }
        Ok(Rule { name, body, head })
    }
}

/// Parses a rule file: any number of `(rule ...)` forms, `;` comments.
/// Range-restriction violations surface as semantic errors with the rule's
/// source position.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>, ParseError> {
    let tokens = lex(text)?;
    let mut cur = Cursor::new(&tokens);
    let mut rules: Vec<Rule> = Vec::new();
    while !cur.at_end() {
        let (line, col) = cur.here();
        cur.expect_lparen()?;
        match cur.peek() {
            Some(TokenKind::Symbol(s)) if s == "rule" => {
                cur.bump();
            }
            _ => return Err(cur.syntax(cur.describe_next(), vec!["rule"])),
        }
        let name = cur.expect_symbol("rule name")?;
        if rules.iter().any(|r| r.name == name) {
            return Err(ParseError::Semantic {
                line,
                col,
                message: format!("duplicate rule '{name}'"),
            });
        }
        cur.expect_keyword("when")?;
        let body = condition(&mut cur)?;
        cur.expect_keyword("derive")?;
        let head = cur.pattern()?;
        cur.expect_rparen()?;
        let rule = Rule::new(name, body, head).map_err(|e| ParseError::Semantic {
            line,
            col,
            message: e.to_string(),
        })?;
        rules.push(rule);
    }
    Ok(rules)
}

/// `(and pattern*)` or a single pattern.
fn condition(cur: &mut Cursor<'_>) -> Result<Vec<Pattern>, ParseError> {
    cur.expect_lparen()?;
    match cur.peek() {
        Some(TokenKind::Symbol(s)) if s == "and" => {
            cur.bump();
            let mut pats = Vec::new();
            loop {
                match cur.peek() {
                    Some(TokenKind::RParen) => {
                        cur.bump();
                        return Ok(pats);
                    }
                    Some(TokenKind::LParen) => pats.push(cur.pattern()?),
                    _ => return Err(cur.syntax(cur.describe_next(), vec!["'('", "')'"])),
                }
            }
        }
        Some(TokenKind::Symbol(_)) => {
            // A single bare pattern: the paren just consumed was its own.
            let predicate = cur.expect_symbol("predicate name")?;
            finish_pattern(cur, predicate)
        }
        _ => Err(cur.syntax(cur.describe_next(), vec!["and", "predicate name"])),
    }
}

/// Completes `(pred ...` whose name is already consumed, returning it as a
/// one-pattern conjunction.
fn finish_pattern(cur: &mut Cursor<'_>, predicate: String) -> Result<Vec<Pattern>, ParseError> {
    use crate::pattern::PatTerm;
    let mut args = Vec::new();
    loop {
        match cur.peek() {
            Some(TokenKind::RParen) => {
                cur.bump();
                return Ok(vec![Pattern { predicate, args }]);
            }
            Some(TokenKind::Symbol(_)) => {
                if let Some(tok) = cur.bump() {
                    if let TokenKind::Symbol(s) = &tok.kind {
                        args.push(PatTerm::Sym(s.clone()));
                    }
                }
            }
            Some(TokenKind::Variable(_)) => {
                if let Some(tok) = cur.bump() {
                    if let TokenKind::Variable(v) = &tok.kind {
                        args.push(PatTerm::Var(v.clone()));
                    }
                }
            }
            Some(TokenKind::Integer(_)) => {
                if let Some(tok) = cur.bump() {
                    if let TokenKind::Integer(i) = &tok.kind {
                        args.push(PatTerm::Int(*i));
                    }
                }
            }
            _ => {
                return Err(cur.syntax(
                    cur.describe_next(),
                    vec!["name", "variable", "integer", "')'"],
                ))
            }
        }
    }
}
