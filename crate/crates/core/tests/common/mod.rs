//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use probdl::tableau::Limits;
use probdl::{Concept, Justification, KnowledgeBase, MonotoneFormula, Query, Reasoner, Valuation};

pub const CRIME: &str = include_str!("../../data/crime.kb");

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// All subset-minimal entailing subsets, by checking every subset of the KB.
pub fn powerset_justifications(kb: &KnowledgeBase, q: &Query) -> Vec<Justification> {
    let m = kb.len();
    assert!(m <= 16, "powerset oracle limited to 16 axioms");
    let mut reasoner = Reasoner::new(kb, Limits::default());
    let goal = reasoner.goal(q);
    let entails: Vec<bool> = (0u32..1 << m)
        .map(|bits| {
            let mask = reasoner.mask_of((0..m).filter(|i| bits >> i & 1 == 1));
            reasoner.entails(&mask, &goal).unwrap()
        })
        .collect();
    let mut out: Vec<Justification> = (0u32..1 << m)
        .filter(|&bits| entails[bits as usize])
        // Entailment is monotone, so single deletions decide minimality.
        .filter(|&bits| {
            (0..m)
                .filter(|i| bits >> i & 1 == 1)
                .all(|i| !entails[(bits & !(1 << i)) as usize])
        })
        .map(|bits| Justification::new((0..m).filter(|i| bits >> i & 1 == 1)))
        .collect();
    out.sort();
    out
}

/// Valuations over `n` variables, in binary counting order.
pub fn valuations(n: usize) -> impl Iterator<Item = Valuation> {
    (0u64..1 << n).map(move |bits| (0..n).filter(|i| bits >> i & 1 == 1).collect())
}

pub fn valuation_weight(v: &Valuation, probs: &[f64]) -> f64 {
    probs
        .iter()
        .enumerate()
        .map(|(i, p)| if v.contains(&i) { *p } else { 1.0 - p })
        .product()
}

/// `sum over satisfying valuations of their weight`.
pub fn enumerated_probability(f: &MonotoneFormula, probs: &[f64]) -> f64 {
    valuations(probs.len())
        .filter(|v| f.satisfies(v))
        .map(|v| valuation_weight(&v, probs))
        .sum()
}

/// Truth-table evaluation of a quantifier-free concept.
pub fn eval_prop(c: &Concept, assignment: &BTreeSet<String>) -> bool {
    match c {
        Concept::Top => true,
        Concept::Bottom => false,
        Concept::Atomic(n) => assignment.contains(n),
        Concept::Not(x) => !eval_prop(x, assignment),
        Concept::And(l, r) => eval_prop(l, assignment) && eval_prop(r, assignment),
        Concept::Or(l, r) => eval_prop(l, assignment) || eval_prop(r, assignment),
        Concept::Exists(..) | Concept::Forall(..) => panic!("quantifier in propositional KB"),
    }
}

/// Entailment for KBs without quantifiers or role assertions, decided by
/// enumerating the propositional types of each individual.
pub fn propositional_entails(
    gcis: &[(Concept, Concept)],
    assertions: &[(String, Concept)],
    atoms: &[&str],
    q: &Query,
) -> bool {
    let types: Vec<BTreeSet<String>> = (0u32..1 << atoms.len())
        .map(|bits| {
            atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| bits >> i & 1 == 1)
                .map(|(_, a)| a.to_string())
                .collect()
        })
        .filter(|t| {
            gcis.iter()
                .all(|(c, d)| !eval_prop(c, t) || eval_prop(d, t))
        })
        .collect();
    let types_of = |ind: &str| -> Vec<&BTreeSet<String>> {
        types
            .iter()
            .filter(|t| {
                assertions
                    .iter()
                    .filter(|(i, _)| i == ind)
                    .all(|(_, c)| eval_prop(c, t))
            })
            .collect()
    };
    let individuals: BTreeSet<&str> = assertions.iter().map(|(i, _)| i.as_str()).collect();
    let consistent = !types.is_empty() && individuals.iter().all(|i| !types_of(i).is_empty());
    if !consistent {
        return true;
    }
    match q {
        Query::InstanceOf {
            individual,
            concept,
        } => types_of(individual).iter().all(|t| eval_prop(concept, t)),
        Query::SubClassOf { sub, sup } => types
            .iter()
            .all(|t| !eval_prop(sub, t) || eval_prop(sup, t)),
    }
}
