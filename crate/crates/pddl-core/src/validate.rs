//! Plan execution and validation over a grounded task.

use crate::ground::{GroundedTask, State};
use crate::lexer::{lex, Token, TokenKind};
use crate::ParseError;

/// An ordered list of grounded action ids with its summed cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub actions: Vec<usize>,
    pub total_cost: u32,
}

impl Plan {
    /// Builds a plan over `task`, computing the cost sum.
    pub fn new(actions: Vec<usize>, task: &GroundedTask) -> Plan {
        let total_cost = actions.iter().map(|&i| task.actions[i].cost).sum();
        Plan {
            actions,
            total_cost,
        }
    }

    /// Renders one `(name args...)` step per line.
    pub fn render(&self, task: &GroundedTask) -> String {
        let mut out = String::new();
        for &i in &self.actions {
            out.push_str(&task.actions[i].signature());
            out.push('\n');
        }
        out
    }
}

/// Parses a plan file — one `(name args...)` step per line, `;` comments —
/// resolving each step against the task's grounded actions.
pub fn parse_plan(text: &str, task: &GroundedTask) -> Result<Plan, ParseError> {
    let tokens = lex(text)?;
    let mut actions = Vec::new();
    let mut pos = 0;
    while pos < tokens.len() {
        let (line, col) = (tokens[pos].line, tokens[pos].col);
        let syntax = |message: String, expected| ParseError::Syntax {
            line,
            col,
            message,
            expected,
        };
        if !matches!(tokens[pos].kind, TokenKind::LParen) {
            return Err(syntax(
                format!("found {}", tokens[pos].kind.describe()),
                vec!["'('"],
            ));
        }
        pos += 1;
        let name = match tokens.get(pos) {
            Some(Token {
                kind: TokenKind::Symbol(s),
                ..
            }) => s.clone(),
            _ => return Err(syntax("expected action name".into(), vec!["action name"])),
        };
        pos += 1;
        let mut args: Vec<String> = Vec::new();
        loop {
            match tokens.get(pos) {
                Some(Token {
                    kind: TokenKind::Symbol(s),
                    ..
                }) => {
                    args.push(s.clone());
                    pos += 1;
                }
                Some(Token {
                    kind: TokenKind::RParen,
                    ..
                }) => {
                    pos += 1;
                    break;
                }
                _ => return Err(syntax("unterminated plan step".into(), vec!["name", "')'"])),
            }
        }
        let arg_refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let id = task.find_action(&name, &arg_refs).ok_or(ParseError::Semantic {
            line,
            col,
            message: format!(
                "({} {}) does not name a grounded action of this task",
                name,
                args.join(" ")
            ),
        })?;
        actions.push(id);
    }
    Ok(Plan::new(actions, task))
}

/// Outcome of executing a plan from the task's initial state.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// True iff every step was applicable in sequence.
    pub valid: bool,
    /// 0-based index of the first inapplicable step, if any.
    pub failing_step: Option<usize>,
    /// State after the last successfully applied step.
    pub final_state: State,
    /// True iff the goal holds in `final_state`.
    pub achieved_goal: bool,
    /// Summed cost of the steps actually applied.
    pub total_cost: u32,
}

/// Executes `plan` from the initial state, stopping at the first
/// inapplicable step. Failures are report content, not errors.
pub fn validate_plan(task: &GroundedTask, plan: &Plan) -> ValidationReport {
    let mut state = task.init.clone();
    let mut total_cost = 0u32;
    for (step, &id) in plan.actions.iter().enumerate() {
        if !task.applicable(&state, id) {
            let achieved_goal = task.is_goal(&state);
            return ValidationReport {
                valid: false,
                failing_step: Some(step),
                final_state: state,
                achieved_goal,
                total_cost,
            };
        }
        state = task.apply(&state, id);
        total_cost += task.actions[id].cost;
    }
    let achieved_goal = task.is_goal(&state);
    ValidationReport {
        valid: true,
        failing_step: None,
        final_state: state,
        achieved_goal,
        total_cost,
    }
}
