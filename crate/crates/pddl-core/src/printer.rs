//! Canonical pretty-printer.
//!
//! Output is a pure function of the syntax tree: stable field order, fixed
//! two-space indentation, one predicate or atom per line, and an explicit
//! `(:action-cost n)` on every action. Printing a parsed domain and parsing
//! the result yields an identical tree, which the tests rely on.

use std::fmt::Write;

use crate::ast::{Atom, Domain, Literal, Problem, Term, TypedVar};

/// Renders a domain in canonical form.
pub fn print_domain(d: &Domain) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (domain {})", d.name);
    if !d.requirements.is_empty() {
        let reqs: Vec<String> = d.requirements.iter().map(|r| format!(":{r}")).collect();
        let _ = writeln!(out, "  (:requirements {})", reqs.join(" "));
    }
    if !d.types.is_empty() {
        let _ = writeln!(out, "  (:types {})", d.types.join(" "));
    }
    if !d.predicates.is_empty() {
        let _ = writeln!(out, "  (:predicates");
        for p in &d.predicates {
            let _ = writeln!(out, "    ({}{})", p.name, typed_vars(&p.params));
        }
        let _ = writeln!(out, "  )");
    }
    for a in &d.actions {
        let _ = writeln!(out, "  (:action {}", a.name);
        let _ = writeln!(out, "    :parameters ({})", typed_vars_bare(&a.params));
        let _ = writeln!(out, "    :precondition {}", condition(&a.precondition));
        let _ = writeln!(out, "    :effect {}", condition(&a.effect));
        let _ = writeln!(out, "    (:action-cost {})", a.cost);
        let _ = writeln!(out, "  )");
    }
    out.push_str(")\n");
    out
}

/// Renders a problem in canonical form. Objects are grouped by type in
/// first-appearance order; init atoms keep their stored order.
pub fn print_problem(p: &Problem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", p.name);
    let _ = writeln!(out, "  (:domain {})", p.domain_name);
    if !p.objects.is_empty() {
        let _ = writeln!(out, "  (:objects");
        let mut types_in_order: Vec<&str> = Vec::new();
        for o in &p.objects {
            if !types_in_order.contains(&o.ty.as_str()) {
                types_in_order.push(&o.ty);
            }
        }
        for ty in types_in_order {
            let names: Vec<&str> = p
                .objects
                .iter()
                .filter(|o| o.ty == ty)
                .map(|o| o.name.as_str())
                .collect();
            let _ = writeln!(out, "    {} - {ty}", names.join(" "));
        }
        let _ = writeln!(out, "  )");
    }
    let _ = writeln!(out, "  (:init");
    for a in &p.init {
        let _ = writeln!(out, "    {a}");
    }
    let _ = writeln!(out, "  )");
    if p.goal.is_empty() {
        let _ = writeln!(out, "  (:goal (and))");
    } else if p.goal.len() == 1 {
        let _ = writeln!(out, "  (:goal {})", p.goal[0]);
    } else {
        let _ = writeln!(out, "  (:goal (and");
        for g in &p.goal {
            let _ = writeln!(out, "    {g}");
        }
        let _ = writeln!(out, "  ))");
    }
    out.push_str(")\n");
    out
}

/// ` ?a ?b - ty` groups for predicate declarations (leading space included
/// when non-empty).
fn typed_vars(params: &[TypedVar]) -> String {
    let s = typed_vars_bare(params);
    if s.is_empty() {
        s
    } else {
        format!(" {s}")
    }
}

/// `?a ?b - ty ?c - other` with consecutive same-type variables grouped.
fn typed_vars_bare(params: &[TypedVar]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < params.len() {
        let ty = &params[i].ty;
        let mut names: Vec<String> = Vec::new();
        while i < params.len() && &params[i].ty == ty {
            names.push(format!("?{}", params[i].name));
            i += 1;
        }
        parts.push(format!("{} - {ty}", names.join(" ")));
    }
    parts.join(" ")
}

/// `(and ...)` over any number of literals; `()` when empty, the bare
/// literal when singular.
fn condition(lits: &[Literal]) -> String {
    match lits {
        [] => "()".to_string(),
        [single] => literal(single),
        many => {
            let inner: Vec<String> = many.iter().map(literal).collect();
            format!("(and {})", inner.join(" "))
        }
    }
}

fn literal(l: &Literal) -> String {
    if l.negated {
        format!("(not {})", atom(&l.atom))
    } else {
        atom(&l.atom)
    }
}

fn atom(a: &Atom) -> String {
    let mut s = format!("({}", a.predicate);
    for t in &a.terms {
        match t {
            Term::Var(v) => {
                let _ = write!(s, " ?{v}");
            }
            Term::Const(c) => {
                let _ = write!(s, " {c}");
            }
        }
    }
    s.push(')');
    s
}
