//! Recursive-descent parser for domains and problems.
//!
//! Parsing distinguishes three diagnostic classes: lexical (bad input
//! characters), syntax (token stream does not fit the grammar, reported with
//! the set of acceptable tokens), and semantic (grammatical input violating
//! declaration or typing rules). Domain sections must appear in canonical
//! order — requirements, types, predicates, actions — so every reference is
//! checked against completed declarations with an exact source span.

use std::collections::{HashMap, HashSet};

use crate::ast::*;
use crate::lexer::{lex, Token, TokenKind};
use crate::ParseError;

/// Parses a domain from source text.
pub fn parse_domain(src: &str) -> Result<Domain, ParseError> {
    let tokens = lex(src)?;
    let mut p = P::new(tokens);
    let d = p.domain()?;
    p.expect_end()?;
    Ok(d)
}

/// Parses a problem from source text, resolving and type-checking its
/// vocabulary against `domain`.
pub fn parse_problem(src: &str, domain: &Domain) -> Result<Problem, ParseError> {
    let tokens = lex(src)?;
    let mut p = P::new(tokens);
    let prob = p.problem(domain)?;
    p.expect_end()?;
    Ok(prob)
}

struct P {
    toks: Vec<Token>,
    pos: usize,
}

impl P {
    fn new(toks: Vec<Token>) -> P {
        P { toks, pos: 0 }
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

    fn semantic(line: u32, col: u32, message: impl Into<String>) -> ParseError {
        ParseError::Semantic {
            line,
            col,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.toks.get(self.pos).map(|t| &t.kind)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn describe_next(&self) -> String {
        match self.toks.get(self.pos) {
            Some(t) => format!("found {}", t.kind.describe()),
            None => "found end of input".to_string(),
        }
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

    fn expect_symbol(&mut self, what: &'static str) -> Result<(String, u32, u32), ParseError> {
        match self.peek() {
            Some(TokenKind::Symbol(_)) => {
                let Some(Token {
                    kind: TokenKind::Symbol(s),
                    line,
                    col,
                }) = self.next()
                else {
                    unreachable!()
                };
                Ok((s, line, col))
            }
            _ => Err(self.syntax(self.describe_next(), vec![what])),
        }
    }

    fn expect_exact_symbol(&mut self, name: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(TokenKind::Symbol(s)) if s == name => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.syntax(self.describe_next(), vec![name])),
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

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(self.syntax(
                format!("trailing input after top-level form, {}", self.describe_next()),
                vec!["end of input"],
            ))
        }
    }

    /// True when the cursor sits on `(:keyword`.
    fn at_section(&self, name: &str) -> bool {
        matches!(self.peek(), Some(TokenKind::LParen))
            && matches!(
                self.toks.get(self.pos + 1).map(|t| &t.kind),
                Some(TokenKind::Keyword(k)) if k == name
            )
    }

    // ---- domains ---------------------------------------------------------

    fn domain(&mut self) -> Result<Domain, ParseError> {
        self.expect_lparen()?;
        self.expect_exact_symbol("define")?;
        self.expect_lparen()?;
        self.expect_exact_symbol("domain")?;
        let (name, _, _) = self.expect_symbol("domain name")?;
        self.expect_rparen()?;

        let mut d = Domain {
            name,
            requirements: Vec::new(),
            types: Vec::new(),
            predicates: Vec::new(),
            actions: Vec::new(),
        };

        if self.at_section("requirements") {
            self.pos += 2;
            self.requirements(&mut d)?;
        }
        if self.at_section("types") {
            self.pos += 2;
            self.types_section(&mut d)?;
        }
        if self.at_section("predicates") {
            self.pos += 2;
            self.predicates_section(&mut d)?;
        }

        // Negative preconditions are only legal on static predicates, which
        // depends on every action's effects; collect spans and check last.
        let mut negatives: Vec<(String, u32, u32)> = Vec::new();
        loop {
            match self.peek() {
                Some(TokenKind::RParen) => {
                    self.pos += 1;
                    break;
                }
                Some(TokenKind::LParen) if self.at_section("action") => {
                    self.pos += 2;
                    let a = self.action(&d, &mut negatives)?;
                    if d.actions.iter().any(|x| x.name == a.name) {
                        return Err(Self::semantic(
                            1,
                            1,
                            format!("duplicate action '{}'", a.name),
                        ));
                    }
                    d.actions.push(a);
                }
                _ => {
                    return Err(self.syntax(
                        self.describe_next(),
                        vec![":action", "')'"],
                    ))
                }
            }
        }

        for (pred, line, col) in negatives {
            if !d.is_static(&pred) {
                return Err(Self::semantic(
                    line,
                    col,
                    format!(
                        "negative precondition on '{pred}', which action effects modify; \
                         negation is only supported on static predicates"
                    ),
                ));
            }
        }
        Ok(d)
    }

    fn requirements(&mut self, d: &mut Domain) -> Result<(), ParseError> {
        loop {
            match self.next() {
                Some(Token {
                    kind: TokenKind::Keyword(k),
                    ..
                }) => d.requirements.push(k),
                Some(Token {
                    kind: TokenKind::RParen,
                    ..
                }) => return Ok(()),
                _ => {
                    self.pos = self.pos.saturating_sub(1);
                    return Err(
                        self.syntax(self.describe_next(), vec!["requirement keyword", "')'"])
                    );
                }
            }
        }
    }

    fn types_section(&mut self, d: &mut Domain) -> Result<(), ParseError> {
        loop {
            match self.next() {
                Some(Token {
                    kind: TokenKind::Symbol(s),
                    line,
                    col,
                }) => {
                    if d.types.contains(&s) {
                        return Err(Self::semantic(line, col, format!("duplicate type '{s}'")));
                    }
                    d.types.push(s);
                }
                Some(Token {
                    kind: TokenKind::RParen,
                    ..
                }) => return Ok(()),
                _ => {
                    self.pos = self.pos.saturating_sub(1);
                    return Err(self.syntax(self.describe_next(), vec!["type name", "')'"]));
                }
            }
        }
    }

    fn predicates_section(&mut self, d: &mut Domain) -> Result<(), ParseError> {
        loop {
            match self.peek() {
                Some(TokenKind::RParen) => {
                    self.pos += 1;
                    return Ok(());
                }
                Some(TokenKind::LParen) => {
                    self.pos += 1;
                    let (name, line, col) = self.expect_symbol("predicate name")?;
                    if d.predicates.iter().any(|p| p.name == name) {
                        return Err(Self::semantic(
                            line,
                            col,
                            format!("duplicate predicate '{name}'"),
                        ));
                    }
                    let params = self.typed_vars(&d.types)?;
                    self.expect_rparen()?;
                    d.predicates.push(PredicateDecl { name, params });
                }
                _ => return Err(self.syntax(self.describe_next(), vec!["'('", "')'"])),
            }
        }
    }

    /// Parses `?a ?b - ty ?c - ty2 ...` up to (not consuming) the closing
    /// paren. Every variable must end up with a declared type.
    fn typed_vars(&mut self, declared_types: &[String]) -> Result<Vec<TypedVar>, ParseError> {
        let mut out: Vec<TypedVar> = Vec::new();
        let mut pending: Vec<(String, u32, u32)> = Vec::new();
        loop {
            match self.peek() {
                Some(TokenKind::Variable(_)) => {
                    let Some(Token {
                        kind: TokenKind::Variable(v),
                        line,
                        col,
                    }) = self.next()
                    else {
                        unreachable!()
                    };
                    pending.push((v, line, col));
                }
                Some(TokenKind::Dash) => {
                    self.pos += 1;
                    let (ty, line, col) = self.expect_symbol("type name")?;
                    if !declared_types.contains(&ty) {
                        return Err(Self::semantic(line, col, format!("undeclared type '{ty}'")));
                    }
                    if pending.is_empty() {
                        return Err(Self::semantic(
                            line,
                            col,
                            format!("type '{ty}' annotates no variables"),
                        ));
                    }
                    for (v, vl, vc) in pending.drain(..) {
                        if out.iter().any(|t| t.name == v) {
                            return Err(Self::semantic(
                                vl,
                                vc,
                                format!("duplicate parameter '?{v}'"),
                            ));
                        }
                        out.push(TypedVar {
                            name: v,
                            ty: ty.clone(),
                        });
                    }
                }
                Some(TokenKind::RParen) => {
                    if let Some((v, line, col)) = pending.first() {
                        return Err(Self::semantic(
                            *line,
                            *col,
                            format!("parameter '?{v}' lacks a type annotation"),
                        ));
                    }
                    return Ok(out);
                }
                _ => return Err(self.syntax(self.describe_next(), vec!["variable", "'-'", "')'"])),
            }
        }
    }

    fn action(
        &mut self,
        d: &Domain,
        negatives: &mut Vec<(String, u32, u32)>,
    ) -> Result<ActionSchema, ParseError> {
        let (name, _, _) = self.expect_symbol("action name")?;
        self.expect_keyword("parameters")?;
        self.expect_lparen()?;
        let params = self.typed_vars(&d.types)?;
        self.expect_rparen()?;

        let mut precondition = Vec::new();
        let mut effect = Vec::new();
        let mut cost: u32 = 1;

        if let Some(TokenKind::Keyword(k)) = self.peek() {
            if k == "precondition" {
                self.pos += 1;
                precondition = self.condition(d, &params, &name, "precondition", Some(negatives))?;
            }
        }
        if let Some(TokenKind::Keyword(k)) = self.peek() {
            if k == "effect" {
                self.pos += 1;
                effect = self.condition(d, &params, &name, "effect", None)?;
            }
        }
        if let Some(TokenKind::LParen) = self.peek() {
            self.pos += 1;
            self.expect_keyword("action-cost")?;
            match self.next() {
                Some(Token {
                    kind: TokenKind::Integer(n),
                    line,
                    col,
                }) => {
                    if n < 0 {
                        return Err(Self::semantic(
                            line,
                            col,
                            format!("action cost must be non-negative, got {n}"),
                        ));
                    }
                    cost = u32::try_from(n).map_err(|_| {
                        Self::semantic(line, col, format!("action cost {n} too large"))
                    })?;
                }
                _ => {
                    self.pos = self.pos.saturating_sub(1);
                    return Err(self.syntax(self.describe_next(), vec!["integer"]));
                }
            }
            self.expect_rparen()?;
        }
        self.expect_rparen()?;

        Ok(ActionSchema {
            name,
            params,
            precondition,
            effect,
            cost,
        })
    }

    /// Parses a condition — `()`, a single literal, or `(and literal*)` —
    /// validating each atom against declarations as it is read. When
    /// `negatives` is given, negated predicates are recorded for the
    /// end-of-domain static check.
    fn condition(
        &mut self,
        d: &Domain,
        params: &[TypedVar],
        action: &str,
        where_: &str,
        mut negatives: Option<&mut Vec<(String, u32, u32)>>,
    ) -> Result<Vec<Literal>, ParseError> {
        self.expect_lparen()?;
        match self.peek() {
            Some(TokenKind::RParen) => {
                self.pos += 1;
                Ok(Vec::new())
            }
            Some(TokenKind::Symbol(s)) if s == "and" => {
                self.pos += 1;
                let mut lits = Vec::new();
                loop {
                    match self.peek() {
                        Some(TokenKind::RParen) => {
                            self.pos += 1;
                            return Ok(lits);
                        }
                        Some(TokenKind::LParen) => {
                            lits.push(self.literal(d, params, action, where_, negatives.as_deref_mut())?);
                        }
                        _ => return Err(self.syntax(self.describe_next(), vec!["'('", "')'"])),
                    }
                }
            }
            _ => {
                // A single bare literal: rewind to its opening paren.
                self.pos -= 1;
                Ok(vec![self.literal(d, params, action, where_, negatives)?])
            }
        }
    }

    fn literal(
        &mut self,
        d: &Domain,
        params: &[TypedVar],
        action: &str,
        where_: &str,
        negatives: Option<&mut Vec<(String, u32, u32)>>,
    ) -> Result<Literal, ParseError> {
        self.expect_lparen()?;
        let negated = match self.peek() {
            Some(TokenKind::Symbol(s)) if s == "not" => {
                self.pos += 1;
                self.expect_lparen()?;
                true
            }
            _ => false,
        };
        let (atom, line, col) = self.atom_body()?;
        if negated {
            self.expect_rparen()?;
            if let Some(negs) = negatives {
                negs.push((atom.predicate.clone(), line, col));
            }
        }
        self.check_schema_atom(d, params, action, where_, &atom, line, col)?;
        Ok(Literal { negated, atom })
    }

    /// Parses `name term*)` with the opening paren already consumed.
    fn atom_body(&mut self) -> Result<(Atom, u32, u32), ParseError> {
        let (predicate, line, col) = self.expect_symbol("predicate name")?;
        let mut terms = Vec::new();
        loop {
            match self.next() {
                Some(Token {
                    kind: TokenKind::Symbol(s),
                    ..
                }) => terms.push(Term::Const(s)),
                Some(Token {
                    kind: TokenKind::Variable(v),
                    ..
                }) => terms.push(Term::Var(v)),
                Some(Token {
                    kind: TokenKind::RParen,
                    ..
                }) => break,
                _ => {
                    self.pos = self.pos.saturating_sub(1);
                    return Err(self.syntax(self.describe_next(), vec!["name", "variable", "')'"]));
                }
            }
        }
        Ok((Atom { predicate, terms }, line, col))
    }

    #[allow(clippy::too_many_arguments)]
    fn check_schema_atom(
        &self,
        d: &Domain,
        params: &[TypedVar],
        action: &str,
        where_: &str,
        atom: &Atom,
        line: u32,
        col: u32,
    ) -> Result<(), ParseError> {
        let decl = d.predicate(&atom.predicate).ok_or_else(|| {
            Self::semantic(
                line,
                col,
                format!(
                    "action '{action}' {where_} uses undeclared predicate '{}'",
                    atom.predicate
                ),
            )
        })?;
        if decl.params.len() != atom.terms.len() {
            return Err(Self::semantic(
                line,
                col,
                format!(
                    "predicate '{}' takes {} arguments, got {}",
                    atom.predicate,
                    decl.params.len(),
                    atom.terms.len()
                ),
            ));
        }
        for (term, pparam) in atom.terms.iter().zip(&decl.params) {
            match term {
                Term::Var(v) => {
                    let bound = params.iter().find(|p| &p.name == v).ok_or_else(|| {
                        Self::semantic(
                            line,
                            col,
                            format!("action '{action}' {where_} uses unbound variable '?{v}'"),
                        )
                    })?;
                    if bound.ty != pparam.ty {
                        return Err(Self::semantic(
                            line,
                            col,
                            format!(
                                "variable '?{v}' has type '{}' but '{}' expects '{}'",
                                bound.ty, atom.predicate, pparam.ty
                            ),
                        ));
                    }
                }
                Term::Const(c) => {
                    return Err(Self::semantic(
                        line,
                        col,
                        format!(
                            "action '{action}' {where_} mentions object '{c}'; object names \
                             are not supported in schemas"
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    // ---- problems --------------------------------------------------------

    fn problem(&mut self, domain: &Domain) -> Result<Problem, ParseError> {
        self.expect_lparen()?;
        self.expect_exact_symbol("define")?;
        self.expect_lparen()?;
        self.expect_exact_symbol("problem")?;
        let (name, _, _) = self.expect_symbol("problem name")?;
        self.expect_rparen()?;

        self.expect_lparen()?;
        self.expect_keyword("domain")?;
        let (domain_name, dl, dc) = self.expect_symbol("domain name")?;
        if domain_name != domain.name {
            return Err(Self::semantic(
                dl,
                dc,
                format!(
                    "problem targets domain '{domain_name}' but was parsed against '{}'",
                    domain.name
                ),
            ));
        }
        self.expect_rparen()?;

        let mut objects: Vec<TypedName> = Vec::new();
        if self.at_section("objects") {
            self.pos += 2;
            self.objects_section(domain, &mut objects)?;
        }

        let object_types: HashMap<&str, &str> = objects
            .iter()
            .map(|o| (o.name.as_str(), o.ty.as_str()))
            .collect();

        self.expect_lparen()?;
        self.expect_keyword("init")?;
        let mut init: Vec<GroundAtom> = Vec::new();
        let mut seen: HashSet<GroundAtom> = HashSet::new();
        loop {
            match self.peek() {
                Some(TokenKind::RParen) => {
                    self.pos += 1;
                    break;
                }
                Some(TokenKind::LParen) => {
                    self.pos += 1;
                    let (atom, line, col) = self.atom_body()?;
                    let ga = Self::ground_atom(domain, &object_types, atom, line, col)?;
                    // Duplicate init atoms collapse silently.
                    if seen.insert(ga.clone()) {
                        init.push(ga);
                    }
                }
                _ => return Err(self.syntax(self.describe_next(), vec!["'('", "')'"])),
            }
        }

        self.expect_lparen()?;
        self.expect_keyword("goal")?;
        let goal = self.goal_condition(domain, &object_types)?;
        self.expect_rparen()?;

        self.expect_rparen()?;
        Ok(Problem {
            name,
            domain_name,
            objects,
            init,
            goal,
        })
    }

    /// Parses the goal: `()`, a single atom, or `(and atom*)`, all positive
    /// and ground.
    fn goal_condition(
        &mut self,
        domain: &Domain,
        object_types: &HashMap<&str, &str>,
    ) -> Result<Vec<GroundAtom>, ParseError> {
        self.expect_lparen()?;
        match self.peek() {
            Some(TokenKind::RParen) => {
                self.pos += 1;
                Ok(Vec::new())
            }
            Some(TokenKind::Symbol(s)) if s == "and" => {
                self.pos += 1;
                let mut out = Vec::new();
                loop {
                    match self.peek() {
                        Some(TokenKind::RParen) => {
                            self.pos += 1;
                            return Ok(out);
                        }
                        Some(TokenKind::LParen) => {
                            self.pos += 1;
                            out.push(self.goal_atom(domain, object_types)?);
                        }
                        _ => return Err(self.syntax(self.describe_next(), vec!["'('", "')'"])),
                    }
                }
            }
            _ => Ok(vec![self.goal_atom(domain, object_types)?]),
        }
    }

    /// Parses one goal atom with the opening paren already consumed.
    fn goal_atom(
        &mut self,
        domain: &Domain,
        object_types: &HashMap<&str, &str>,
    ) -> Result<GroundAtom, ParseError> {
        if let Some(TokenKind::Symbol(s)) = self.peek() {
            if s == "not" {
                let (line, col) = self.here();
                return Err(Self::semantic(
                    line,
                    col,
                    "negative goal literals are not supported".to_string(),
                ));
            }
        }
        let (atom, line, col) = self.atom_body()?;
        Self::ground_atom(domain, object_types, atom, line, col)
    }

    fn objects_section(
        &mut self,
        domain: &Domain,
        objects: &mut Vec<TypedName>,
    ) -> Result<(), ParseError> {
        let mut pending: Vec<(String, u32, u32)> = Vec::new();
        loop {
            match self.peek() {
                Some(TokenKind::Symbol(_)) => {
                    let Some(Token {
                        kind: TokenKind::Symbol(s),
                        line,
                        col,
                    }) = self.next()
                    else {
                        unreachable!()
                    };
                    pending.push((s, line, col));
                }
                Some(TokenKind::Dash) => {
                    self.pos += 1;
                    let (ty, line, col) = self.expect_symbol("type name")?;
                    if !domain.types.contains(&ty) {
                        return Err(Self::semantic(line, col, format!("undeclared type '{ty}'")));
                    }
                    if pending.is_empty() {
                        return Err(Self::semantic(
                            line,
                            col,
                            format!("type '{ty}' annotates no objects"),
                        ));
                    }
                    for (name, nl, nc) in pending.drain(..) {
                        if objects.iter().any(|o| o.name == name) {
                            return Err(Self::semantic(
                                nl,
                                nc,
                                format!("duplicate object '{name}'"),
                            ));
                        }
                        objects.push(TypedName {
                            name,
                            ty: ty.clone(),
                        });
                    }
                }
                Some(TokenKind::RParen) => {
                    if let Some((name, line, col)) = pending.first() {
                        return Err(Self::semantic(
                            *line,
                            *col,
                            format!("object '{name}' lacks a type annotation"),
                        ));
                    }
                    self.pos += 1;
                    return Ok(());
                }
                _ => return Err(self.syntax(self.describe_next(), vec!["name", "'-'", "')'"])),
            }
        }
    }

    /// Resolves an atom from `:init` or `:goal` into a ground atom, checking
    /// declarations, arity, and argument types.
    fn ground_atom(
        domain: &Domain,
        object_types: &HashMap<&str, &str>,
        atom: Atom,
        line: u32,
        col: u32,
    ) -> Result<GroundAtom, ParseError> {
        let decl = domain.predicate(&atom.predicate).ok_or_else(|| {
            Self::semantic(
                line,
                col,
                format!("undeclared predicate '{}'", atom.predicate),
            )
        })?;
        if decl.params.len() != atom.terms.len() {
            return Err(Self::semantic(
                line,
                col,
                format!(
                    "predicate '{}' takes {} arguments, got {}",
                    atom.predicate,
                    decl.params.len(),
                    atom.terms.len()
                ),
            ));
        }
        let mut args = Vec::with_capacity(atom.terms.len());
        for (term, param) in atom.terms.into_iter().zip(&decl.params) {
            match term {
                Term::Var(v) => {
                    return Err(Self::semantic(
                        line,
                        col,
                        format!("variable '?{v}' is not allowed in ground atoms"),
                    ));
                }
                Term::Const(name) => {
                    let ty = object_types.get(name.as_str()).ok_or_else(|| {
                        Self::semantic(line, col, format!("undeclared object '{name}'"))
                    })?;
                    if *ty != param.ty {
                        return Err(Self::semantic(
                            line,
                            col,
                            format!(
                                "object '{name}' has type '{ty}' but '{}' expects '{}'",
                                atom.predicate, param.ty
                            ),
                        ));
                    }
                    args.push(name);
                }
            }
        }
        Ok(GroundAtom {
            predicate: atom.predicate,
            args,
        })
    }
}
