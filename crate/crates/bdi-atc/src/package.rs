//! Mission packages: procedural plan specifications plus the initial
//! beliefs and inference rules they run against.
//!
//! Package files reuse the planning language's s-expression lexer. A file
//! is any mix of top-level forms, with `;` comments:
//!
//! ```text
//! (predicates (<name> <arity>)*)
//! (fact (<predicate> <ground-arg>*))
//! (rule <name> :when <condition> :derive <pattern>)
//! (plan <Name>
//!   :goal <label>
//!   :precondition <condition>
//!   :context <condition>
//!   :utility <integer>
//!   :body (<step>+)
//!   :effects (<pattern>*))
//!
//! <condition> ::= () | (and <pattern>*) | <pattern>
//! <step>      ::= (emit-command <pattern>) | (ks-assert <pattern>)
//!               | (dp-request) | (wait-for <pattern>)
//! ```
//!
//! Plan sections appear in the order shown. Every predicate a plan, rule,
//! or fact mentions must be declared with its arity in some `(predicates)`
//! form of the package — command names in `emit-command` steps are not
//! predicates and need no declaration. Variables used by `emit-command`,
//! `ks-assert`, or `:effects` must be bound by the precondition or an
//! earlier `wait-for` step; `:context` patterns are checks, so their
//! variables stay local.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use knowledge::{PatTerm, Pattern, Rule, Term};
use pddl_core::lexer::{lex, Token, TokenKind};
use pddl_core::ParseError;

use crate::error::AtcError;

/// One package file: a name for diagnostics and its text.
#[derive(Debug, Clone)]
pub struct PackageSource {
    pub name: String,
    pub text: String,
}

impl PackageSource {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> PackageSource {
        PackageSource {
            name: name.into(),
            text: text.into(),
        }
    }
}

/// One body step of a plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanStep {
    /// Publish a symbolic command for the command-translation layer.
    EmitCommand { command: Pattern },
    /// Write a fact into the knowledge store.
    KsAssert { fact: Pattern },
    /// Ask the planning service for a solution; the intention parks in
    /// `waiting` until the response arrives.
    DpRequest,
    /// Idle until the pattern matches current beliefs; a match may extend
    /// the intention's bindings.
    WaitFor { pattern: Pattern },
}

impl PlanStep {
    /// Short step-kind name for logs and diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            PlanStep::EmitCommand { .. } => "emit-command",
            PlanStep::KsAssert { .. } => "ks-assert",
            PlanStep::DpRequest => "dp-request",
            PlanStep::WaitFor { .. } => "wait-for",
        }
    }
}

/// A procedural task specification: what it is for (goal), when it may be
/// adopted (precondition), what must keep holding while it runs (context),
/// what it does (body), how strongly it competes for adoption (utility),
/// and what it leaves behind on success (effects).
#[derive(Debug, Clone, PartialEq)]
pub struct PlanSpec {
    pub name: String,
    pub goal: String,
    pub precondition: Vec<Pattern>,
    pub context: Vec<Pattern>,
    pub utility: i64,
    pub body: Vec<PlanStep>,
    pub effects: Vec<Pattern>,
}

/// A validated mission package: plans in declaration order, initial facts,
/// inference rules, and the declared predicate vocabulary (name → arity).
#[derive(Debug, Clone)]
pub struct MissionPackage {
    pub plans: Vec<PlanSpec>,
    pub facts: Vec<(String, Vec<Term>)>,
    pub rules: Vec<Rule>,
    pub predicates: BTreeMap<String, usize>,
}

impl MissionPackage {
    pub fn plan(&self, name: &str) -> Option<&PlanSpec> {
        self.plans.iter().find(|p| p.name == name)
    }
}

/// Reads and validates a package from files on disk.
pub fn load_mission_package<P: AsRef<Path>>(paths: &[P]) -> Result<MissionPackage, AtcError> {
    let mut sources = Vec::new();
    for p in paths {
        let path = p.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| AtcError::Io {
            path: path.display().to_string(),
            source,
        })?;
        sources.push(PackageSource::new(path.display().to_string(), text));
    }
    parse_package(&sources)
}

/// Parses and validates a package from in-memory sources.
pub fn parse_package(sources: &[PackageSource]) -> Result<MissionPackage, AtcError> {
    let mut plans: Vec<Located<PlanSpec>> = Vec::new();
    let mut facts: Vec<Located<(String, Vec<Term>)>> = Vec::new();
    let mut rules: Vec<Located<Rule>> = Vec::new();
    let mut predicates: BTreeMap<String, usize> = BTreeMap::new();

    for source in sources {
        let tokens = lex(&source.text).map_err(|e| parse_err(&source.name, e))?;
        let mut cur = Cursor::new(&tokens);
        while !cur.at_end() {
            let (line, _) = cur.here();
            cur.expect_lparen().map_err(|e| parse_err(&source.name, e))?;
            let head = cur
                .expect_symbol("form name")
                .map_err(|e| parse_err(&source.name, e))?;
            match head.as_str() {
                "predicates" => {
                    for (name, arity, decl_line) in
                        cur.predicates().map_err(|e| parse_err(&source.name, e))?
                    {
                        match predicates.get(&name) {
                            Some(&prev) if prev != arity => {
                                return Err(package_err(
                                    &source.name,
                                    decl_line,
                                    format!(
                                        "predicate '{name}' redeclared with arity {arity} (was {prev})"
                                    ),
                                ));
                            }
                            _ => {
                                predicates.insert(name, arity);
                            }
                        }
                    }
                }
                "fact" => {
                    let pattern = cur.pattern().map_err(|e| parse_err(&source.name, e))?;
                    cur.expect_rparen().map_err(|e| parse_err(&source.name, e))?;
                    let args = ground_args(&pattern).ok_or_else(|| {
                        package_err(
                            &source.name,
                            line,
                            format!("initial fact '{}' must be ground", pattern.predicate),
                        )
                    })?;
                    facts.push(located(source, line, (pattern.predicate.clone(), args)));
                }
                "rule" => {
                    let rule = cur.rule().map_err(|e| parse_err(&source.name, e))?;
                    if rules.iter().any(|r| r.item.name == rule.name) {
                        return Err(package_err(
                            &source.name,
                            line,
                            format!("duplicate rule '{}'", rule.name),
                        ));
                    }
                    rules.push(located(source, line, rule));
                }
                "plan" => {
                    let plan = cur.plan(&source.name).map_err(plan_err(&source.name))?;
                    if plans.iter().any(|p| p.item.name == plan.name) {
                        return Err(package_err(
                            &source.name,
                            line,
                            format!("duplicate plan '{}'", plan.name),
                        ));
                    }
                    if plan.body.is_empty() {
                        return Err(package_err(
                            &source.name,
                            line,
                            format!("plan '{}' has an empty body", plan.name),
                        ));
                    }
                    plans.push(located(source, line, plan));
                }
                other => {
                    return Err(package_err(
                        &source.name,
                        line,
                        format!("unknown form '{other}' (expected predicates, fact, rule, or plan)"),
                    ));
                }
            }
        }
    }

    if plans.is_empty() {
        return Err(AtcError::EmptyPackage);
    }
    validate(&plans, &facts, &rules, &predicates)?;

    Ok(MissionPackage {
        plans: plans.into_iter().map(|l| l.item).collect(),
        facts: facts.into_iter().map(|l| l.item).collect(),
        rules: rules.into_iter().map(|l| l.item).collect(),
        predicates,
    })
}

/// The shipped surveillance package, as sources (for reparsing or copying
/// into run artifacts).
pub fn demo_sources() -> Vec<PackageSource> {
    vec![
        PackageSource::new(
            "plans.sexp",
            include_str!("../missions/surveillance/plans.sexp"),
        ),
        PackageSource::new(
            "rules.sexp",
            include_str!("../missions/surveillance/rules.sexp"),
        ),
        PackageSource::new(
            "beliefs.sexp",
            include_str!("../missions/surveillance/beliefs.sexp"),
        ),
    ]
}

/// The shipped surveillance package, parsed and validated.
pub fn demo_package() -> MissionPackage {
    parse_package(&demo_sources()).expect("shipped package is valid")
}

// ---------------------------------------------------------------------------
// Validation

struct Located<T> {
    file: String,
    line: u32,
    item: T,
}

fn located<T>(source: &PackageSource, line: u32, item: T) -> Located<T> {
    Located {
        file: source.name.clone(),
        line,
        item,
    }
}

fn validate(
    plans: &[Located<PlanSpec>],
    facts: &[Located<(String, Vec<Term>)>],
    rules: &[Located<Rule>],
    predicates: &BTreeMap<String, usize>,
) -> Result<(), AtcError> {
    let declared = |pred: &str, arity: usize, what: &str, file: &str, line: u32| {
        match predicates.get(pred) {
            None => Err(package_err(
                file,
                line,
                format!("{what} references undeclared predicate '{pred}'"),
            )),
            Some(&a) if a != arity => Err(package_err(
                file,
                line,
                format!("{what} uses '{pred}' with {arity} argument(s), declared with {a}"),
            )),
            Some(_) => Ok(()),
        }
    };

    for f in facts {
        let (pred, args) = &f.item;
        declared(pred, args.len(), "initial fact", &f.file, f.line)?;
    }
    for r in rules {
        let what = format!("rule '{}'", r.item.name);
        for p in r.item.body.iter().chain(std::iter::once(&r.item.head)) {
            declared(&p.predicate, p.args.len(), &what, &r.file, r.line)?;
        }
    }
    for p in plans {
        let plan = &p.item;
        let what = format!("plan '{}'", plan.name);
        for pat in plan.precondition.iter().chain(&plan.context).chain(&plan.effects) {
            declared(&pat.predicate, pat.args.len(), &what, &p.file, p.line)?;
        }
        for step in &plan.body {
            match step {
                PlanStep::KsAssert { fact } => {
                    declared(&fact.predicate, fact.args.len(), &what, &p.file, p.line)?;
                }
                PlanStep::WaitFor { pattern } => {
                    declared(&pattern.predicate, pattern.args.len(), &what, &p.file, p.line)?;
                }
                // Command names are not predicates; dp-request names nothing.
                PlanStep::EmitCommand { .. } | PlanStep::DpRequest => {}
            }
        }
        check_variable_flow(plan, &p.file, p.line)?;
    }
    Ok(())
}

/// Variables written somewhere (commands, assertions, effects) must have a
/// binder: the precondition or an earlier `wait-for`. Without this check a
/// plan could reach instantiation with a hole in it mid-mission.
fn check_variable_flow(plan: &PlanSpec, file: &str, line: u32) -> Result<(), AtcError> {
    let mut bound: HashSet<&str> = plan
        .precondition
        .iter()
        .flat_map(|p| p.variables())
        .collect();
    let unbound = |pat: &Pattern, bound: &HashSet<&str>| {
        pat.variables()
            .find(|v| !bound.contains(v))
            .map(str::to_string)
    };
    for step in &plan.body {
        match step {
            PlanStep::EmitCommand { command } => {
                if let Some(v) = unbound(command, &bound) {
                    return Err(package_err(
                        file,
                        line,
                        format!(
                            "plan '{}': variable ?{v} in emit-command is never bound by the precondition or an earlier wait-for",
                            plan.name
                        ),
                    ));
                }
            }
            PlanStep::KsAssert { fact } => {
                if let Some(v) = unbound(fact, &bound) {
                    return Err(package_err(
                        file,
                        line,
                        format!(
                            "plan '{}': variable ?{v} in ks-assert is never bound by the precondition or an earlier wait-for",
                            plan.name
                        ),
                    ));
                }
            }
            PlanStep::WaitFor { pattern } => bound.extend(pattern.variables()),
            PlanStep::DpRequest => {}
        }
    }
    for pat in &plan.effects {
        if let Some(v) = unbound(pat, &bound) {
            return Err(package_err(
                file,
                line,
                format!(
                    "plan '{}': variable ?{v} in effects is never bound by the precondition or a wait-for",
                    plan.name
                ),
            ));
        }
    }
    Ok(())
}

fn ground_args(pattern: &Pattern) -> Option<Vec<Term>> {
    pattern
        .args
        .iter()
        .map(|a| match a {
            PatTerm::Sym(s) => Some(Term::Sym(s.clone())),
            PatTerm::Int(i) => Some(Term::Int(*i)),
            PatTerm::Var(_) => None,
        })
        .collect()
}

fn parse_err(file: &str, source: ParseError) -> AtcError {
    AtcError::Parse {
        file: file.to_string(),
        source,
    }
}

fn package_err(file: &str, line: u32, message: String) -> AtcError {
    AtcError::Package {
        file: file.to_string(),
        line,
        message,
    }
}

fn plan_err(file: &str) -> impl Fn(ParseError) -> AtcError + '_ {
    move |e| parse_err(file, e)
}

// ---------------------------------------------------------------------------
// Reader

/// Minimal token cursor over the shared s-expression lexer.
struct Cursor<'t> {
    toks: &'t [Token],
    pos: usize,
}

impl<'t> Cursor<'t> {
    fn new(toks: &'t [Token]) -> Cursor<'t> {
        Cursor { toks, pos: 0 }
    }

    fn here(&self) -> (u32, u32) {
        match self.toks.get(self.pos) {
            Some(t) => (t.line, t.col),
            None => self
                .toks
                .last()
                .map(|t| (t.line, t.col + 1))
                .unwrap_or((1, 1)),
        }
    }

    fn syntax(&self, message: impl Into<String>, expected: Vec<&'static str>) -> ParseError {
        let (line, col) = self.here();
        ParseError::Syntax {
            line,
            col,
            message: message.into(),
            expected,
        }
    }

    fn describe_next(&self) -> String {
        match self.toks.get(self.pos) {
            Some(t) => format!("found {}", t.kind.describe()),
            None => "found end of input".to_string(),
        }
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.toks.get(self.pos).map(|t| &t.kind)
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn at_end(&self) -> bool {
        self.pos == self.toks.len()
    }

    fn expect_lparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(TokenKind::LParen) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.syntax(self.describe_next(), vec!["'('"])),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(TokenKind::RParen) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.syntax(self.describe_next(), vec!["')'"])),
        }
    }

    fn expect_symbol(&mut self, what: &'static str) -> Result<String, ParseError> {
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

    fn expect_keyword(&mut self, name: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(TokenKind::Keyword(k)) if k == name => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.syntax(self.describe_next(), vec![name])),
        }
    }

    fn expect_integer(&mut self, what: &'static str) -> Result<i64, ParseError> {
        match self.peek() {
            Some(TokenKind::Integer(_)) => {
                let Some(Token {
                    kind: TokenKind::Integer(i),
                    ..
                }) = self.bump()
                else {
                    unreachable!()
                };
                Ok(*i)
            }
            _ => Err(self.syntax(self.describe_next(), vec![what])),
        }
    }

    /// Parses `(predicate arg*)` — symbols, integers, `?variables`.
    fn pattern(&mut self) -> Result<Pattern, ParseError> {
        self.expect_lparen()?;
        let predicate = self.expect_symbol("predicate name")?;
        self.pattern_tail(predicate)
    }

    /// Completes a pattern whose `(name` prefix is already consumed.
    fn pattern_tail(&mut self, predicate: String) -> Result<Pattern, ParseError> {
        let mut args = Vec::new();
        loop {
            match self.peek() {
                Some(TokenKind::RParen) => {
                    self.pos += 1;
                    return Ok(Pattern { predicate, args });
                }
                Some(TokenKind::Symbol(_)) => {
                    if let Some(Token {
                        kind: TokenKind::Symbol(s),
                        ..
                    }) = self.bump()
                    {
                        args.push(PatTerm::Sym(s.clone()));
                    }
                }
                Some(TokenKind::Variable(_)) => {
                    if let Some(Token {
                        kind: TokenKind::Variable(v),
                        ..
                    }) = self.bump()
                    {
                        args.push(PatTerm::Var(v.clone()));
                    }
                }
                Some(TokenKind::Integer(_)) => {
                    if let Some(Token {
                        kind: TokenKind::Integer(i),
                        ..
                    }) = self.bump()
                    {
                        args.push(PatTerm::Int(*i));
                    }
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

    /// `()` for the empty conjunction, `(and pattern*)`, or one pattern.
    fn condition(&mut self) -> Result<Vec<Pattern>, ParseError> {
        self.expect_lparen()?;
        match self.peek() {
            Some(TokenKind::RParen) => {
                self.pos += 1;
                Ok(Vec::new())
            }
            Some(TokenKind::Symbol(s)) if s == "and" => {
                self.pos += 1;
                let mut pats = Vec::new();
                loop {
                    match self.peek() {
                        Some(TokenKind::RParen) => {
                            self.pos += 1;
                            return Ok(pats);
                        }
                        Some(TokenKind::LParen) => pats.push(self.pattern()?),
                        _ => return Err(self.syntax(self.describe_next(), vec!["'('", "')'"])),
                    }
                }
            }
            Some(TokenKind::Symbol(_)) => {
                let predicate = self.expect_symbol("predicate name")?;
                Ok(vec![self.pattern_tail(predicate)?])
            }
            _ => Err(self.syntax(self.describe_next(), vec!["and", "predicate name", "')'"])),
        }
    }

    /// The entries of a `(predicates ...)` form whose head is consumed.
    fn predicates(&mut self) -> Result<Vec<(String, usize, u32)>, ParseError> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                Some(TokenKind::RParen) => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some(TokenKind::LParen) => {
                    let (line, _) = self.here();
                    self.pos += 1;
                    let name = self.expect_symbol("predicate name")?;
                    let arity = self.expect_integer("arity")?;
                    if arity < 0 {
                        return Err(self.syntax(
                            format!("negative arity for '{name}'"),
                            vec!["non-negative integer"],
                        ));
                    }
                    self.expect_rparen()?;
                    out.push((name, arity as usize, line));
                }
                _ => return Err(self.syntax(self.describe_next(), vec!["'('", "')'"])),
            }
        }
    }

    /// A `(rule ...)` form whose head symbol is consumed.
    fn rule(&mut self) -> Result<Rule, ParseError> {
        let (line, col) = self.here();
        let name = self.expect_symbol("rule name")?;
        self.expect_keyword("when")?;
        let body = self.condition()?;
        self.expect_keyword("derive")?;
        let head = self.pattern()?;
        self.expect_rparen()?;
        Rule::new(name, body, head).map_err(|e| ParseError::Semantic {
            line,
            col,
            message: e.to_string(),
        })
    }

    /// A `(plan ...)` form whose head symbol is consumed.
    fn plan(&mut self, _file: &str) -> Result<PlanSpec, ParseError> {
        let name = self.expect_symbol("plan name")?;
        self.expect_keyword("goal")?;
        let goal = self.expect_symbol("goal label")?;
        self.expect_keyword("precondition")?;
        let precondition = self.condition()?;
        self.expect_keyword("context")?;
        let context = self.condition()?;
        self.expect_keyword("utility")?;
        let utility = self.expect_integer("utility")?;
        self.expect_keyword("body")?;
        let body = self.body()?;
        self.expect_keyword("effects")?;
        let effects = self.pattern_list()?;
        self.expect_rparen()?;
        Ok(PlanSpec {
            name,
            goal,
            precondition,
            context,
            utility,
            body,
            effects,
        })
    }

    /// `(<step>*)` — emptiness is a validation concern, not a syntax one.
    fn body(&mut self) -> Result<Vec<PlanStep>, ParseError> {
        self.expect_lparen()?;
        let mut steps = Vec::new();
        loop {
            match self.peek() {
                Some(TokenKind::RParen) => {
                    self.pos += 1;
                    return Ok(steps);
                }
                Some(TokenKind::LParen) => {
                    self.pos += 1;
                    let head = self.expect_symbol("step kind")?;
                    let step = match head.as_str() {
                        "emit-command" => PlanStep::EmitCommand {
                            command: self.pattern()?,
                        },
                        "ks-assert" => PlanStep::KsAssert {
                            fact: self.pattern()?,
                        },
                        "dp-request" => PlanStep::DpRequest,
                        "wait-for" => PlanStep::WaitFor {
                            pattern: self.pattern()?,
                        },
                        other => {
                            return Err(self.syntax(
                                format!("unknown step kind '{other}'"),
                                vec!["emit-command", "ks-assert", "dp-request", "wait-for"],
                            ))
                        }
                    };
                    self.expect_rparen()?;
                    steps.push(step);
                }
                _ => return Err(self.syntax(self.describe_next(), vec!["'('", "')'"])),
            }
        }
    }

    /// `(<pattern>*)`.
    fn pattern_list(&mut self) -> Result<Vec<Pattern>, ParseError> {
        self.expect_lparen()?;
        let mut pats = Vec::new();
        loop {
            match self.peek() {
                Some(TokenKind::RParen) => {
                    self.pos += 1;
                    return Ok(pats);
                }
                Some(TokenKind::LParen) => pats.push(self.pattern()?),
                _ => return Err(self.syntax(self.describe_next(), vec!["'('", "')'"])),
            }
        }
    }
}
