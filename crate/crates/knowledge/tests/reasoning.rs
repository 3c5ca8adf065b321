//! Inference is checked against a deliberately naive fixpoint oracle: no
//! indexes, no deltas, just re-joining every rule against every fact until
//! nothing changes.

use std::collections::BTreeSet;

use proptest::prelude::*;

use knowledge::{parse_rules, Binding, Fact, KnowledgeStore, Pattern, Rule, Source, Term};

type Identity = (String, Vec<Term>);

fn rules_under_test() -> Vec<Rule> {
    parse_rules(
        r#"
(rule join    :when (and (p ?x ?y) (q ?y)) :derive (r ?x))
(rule lift    :when (r ?x)                 :derive (s ?x ?x))
(rule feed    :when (and (s ?x ?y) (p ?y ?z)) :derive (q ?z))
"#,
    )
    .unwrap()
}

/// Brute-force fixpoint: repeatedly tries every rule against every
/// combination of stored facts.
fn naive_fixpoint(seed: &BTreeSet<Identity>, rules: &[Rule]) -> BTreeSet<Identity> {
    let mut facts = seed.clone();
    loop {
        let mut added = Vec::new();
        for rule in rules {
            let all: Vec<Fact> = facts
                .iter()
                .map(|(p, a)| Fact {
                    predicate: p.clone(),
                    args: a.clone(),
                    tick: 0,
                    source: Source::Sensor,
                    revision: 0,
                })
                .collect();
            let mut bindings = vec![Binding::new()];
            for pattern in &rule.body {
                let mut next = Vec::new();
                for b in &bindings {
                    for f in &all {
                        if let Some(e) = pattern.unify(f, b) {
                            next.push(e);
                        }
                    }
                }
                bindings = next;
            }
            for b in bindings {
                let head = rule.head.instantiate(&b).unwrap();
                if !facts.contains(&head) {
                    added.push(head);
                }
            }
        }
        if added.is_empty() {
            return facts;
        }
        facts.extend(added);
    }
}

fn store_identities(ks: &KnowledgeStore) -> BTreeSet<Identity> {
    ks.facts()
        .into_iter()
        .map(|f| (f.predicate.clone(), f.args.clone()))
        .collect()
}

fn arb_seed_facts() -> impl Strategy<Value = Vec<(String, Vec<Term>)>> {
    let constant = prop_oneof![
        Just("a".to_string()),
        Just("b".to_string()),
        Just("c".to_string()),
        Just("d".to_string()),
    ];
    let p_fact = (constant.clone(), constant.clone())
        .prop_map(|(x, y)| ("p".to_string(), vec![Term::Sym(x), Term::Sym(y)]));
    let q_fact = constant.clone().prop_map(|x| ("q".to_string(), vec![Term::Sym(x)]));
    let r_fact = constant.prop_map(|x| ("r".to_string(), vec![Term::Sym(x)]));
    proptest::collection::vec(prop_oneof![p_fact, q_fact, r_fact], 0..12)
}

proptest! {
    /// Semi-naive chaining lands on exactly the naive fixpoint.
    #[test]
    fn infer_matches_the_naive_oracle(seed in arb_seed_facts()) {
        let rules = rules_under_test();
        let mut ks = KnowledgeStore::new();
        for (pred, args) in &seed {
            ks.assert_fact(pred.clone(), args.clone(), Source::Sensor);
        }
        let expected = naive_fixpoint(&store_identities(&ks), &rules);
        ks.infer(&rules).unwrap();
        prop_assert_eq!(store_identities(&ks), expected);
    }

    /// The fixpoint does not depend on rule evaluation order.
    #[test]
    fn rule_order_does_not_change_the_fixpoint(
        seed in arb_seed_facts(),
        perm in Just(()).prop_perturb(|_, mut rng| {
            let mut idx = vec![0usize, 1, 2];
            for i in (1..idx.len()).rev() {
                let j = rng.random_range(0..=i);
                idx.swap(i, j);
            }
            idx
        }),
    ) {
        let rules = rules_under_test();
        let shuffled: Vec<Rule> = perm.iter().map(|&i| rules[i].clone()).collect();

        let mut a = KnowledgeStore::new();
        let mut b = KnowledgeStore::new();
        for (pred, args) in &seed {
            a.assert_fact(pred.clone(), args.clone(), Source::Sensor);
            b.assert_fact(pred.clone(), args.clone(), Source::Sensor);
        }
        a.infer(&rules).unwrap();
        b.infer(&shuffled).unwrap();
        prop_assert_eq!(store_identities(&a), store_identities(&b));
    }

    /// Inference is monotone: every pre-existing fact survives.
    #[test]
    fn infer_is_monotone(seed in arb_seed_facts()) {
        let rules = rules_under_test();
        let mut ks = KnowledgeStore::new();
        for (pred, args) in &seed {
            ks.assert_fact(pred.clone(), args.clone(), Source::Sensor);
        }
        let before = store_identities(&ks);
        ks.infer(&rules).unwrap();
        let after = store_identities(&ks);
        prop_assert!(before.is_subset(&after));
    }
}

#[test]
fn derived_context_rule_fires_only_with_both_detections() {
    let rules = parse_rules(
        "(rule complex :when (and (detected-target ?a) (detected-threat ?b)) :derive (complex-situation))",
    )
    .unwrap();
    let mut ks = KnowledgeStore::new();
    ks.assert_fact("detected-target", vec![Term::sym("c3_4")], Source::Sensor);
    assert!(ks.infer(&rules).unwrap().is_empty());
    ks.assert_fact("detected-threat", vec![Term::sym("c1_1")], Source::Sensor);
    let derived = ks.infer(&rules).unwrap();
    assert_eq!(derived.len(), 1);
    assert_eq!(derived[0].predicate, "complex-situation");
    assert!(!ks.query(&Pattern::parse("(complex-situation)").unwrap()).is_empty());
}
