//! The shipped survey domain and its soft-threat variant.

use std::borrow::Cow;

use pddl_core::{parse_domain, print_domain, Domain};

use crate::config::ThreatModel;

/// Planning-domain text for grid surveys: cardinal motion with fused turns,
/// forward/left/right sector scans, and target acquisition. Moves into
/// known threat cells are forbidden outright.
pub fn domain_text() -> &'static str {
    include_str!("../assets/droneworld-scan.pddl")
}

/// The shipped domain with threat avoidance relaxed: next to each move
/// schema (which still refuses threat cells) a `-risky` twin is admitted
/// that enters a threat cell at `penalty` extra cost. Scans and acquisition
/// are unrestricted in both variants.
pub fn domain_with_soft_threats(penalty: u32) -> String {
    let mut d = parse_domain(domain_text()).expect("embedded domain text parses");
    let movers: Vec<_> = d
        .actions
        .iter()
        .filter(|a| {
            a.precondition
                .iter()
                .any(|l| l.negated && l.atom.predicate == "threat")
        })
        .cloned()
        .collect();
    for mut schema in movers {
        schema.name = format!("{}-risky", schema.name);
        for lit in &mut schema.precondition {
            if lit.atom.predicate == "threat" {
                lit.negated = false;
            }
        }
        schema.cost += penalty;
        d.actions.push(schema);
    }
    print_domain(&d)
}

/// Domain text for a threat model: the static asset for hard constraints,
/// the derived variant for soft ones.
pub fn domain_for(threats: ThreatModel) -> Cow<'static, str> {
    match threats {
        ThreatModel::Hard => Cow::Borrowed(domain_text()),
        ThreatModel::Soft { penalty } => Cow::Owned(domain_with_soft_threats(penalty)),
    }
}

/// Parsed form of [`domain_for`].
pub fn parsed_domain_for(threats: ThreatModel) -> Domain {
    parse_domain(&domain_for(threats)).expect("derived domain text parses")
}
