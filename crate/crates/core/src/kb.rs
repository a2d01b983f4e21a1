//! Abstract syntax for ALC knowledge bases with probability annotations.
//!
//! A [`KnowledgeBase`] is an ordered list of axioms. Positions in that list
//! are the axiom indices used by every downstream component (tableau traces,
//! justifications, decision-diagram variables), so they never change after
//! construction.

use std::collections::BTreeSet;
use std::fmt;

/// An ALC concept expression.
///
/// Conjunctions and disjunctions are binary; longer chains are nested to the
/// right (`A and B and C` is `And(A, And(B, C))`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Top,
    Bottom,
    Atomic(String),
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    Or(Box<Concept>, Box<Concept>),
    Exists(String, Box<Concept>),
    Forall(String, Box<Concept>),
}

impl Concept {
    pub fn atomic(name: impl Into<String>) -> Self {
        Concept::Atomic(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Concept) -> Self {
        Concept::Not(Box::new(c))
    }

    pub fn and(l: Concept, r: Concept) -> Self {
        Concept::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Concept, r: Concept) -> Self {
        Concept::Or(Box::new(l), Box::new(r))
    }

    pub fn exists(role: impl Into<String>, c: Concept) -> Self {
        Concept::Exists(role.into(), Box::new(c))
    }

    pub fn forall(role: impl Into<String>, c: Concept) -> Self {
        Concept::Forall(role.into(), Box::new(c))
    }

    /// Negation normal form: negation is pushed down to atomic concepts and
    /// `not Top` / `not Bottom` are resolved.
    pub fn nnf(&self) -> Concept {
        match self {
            Concept::Top | Concept::Bottom | Concept::Atomic(_) => self.clone(),
            Concept::And(l, r) => Concept::and(l.nnf(), r.nnf()),
            Concept::Or(l, r) => Concept::or(l.nnf(), r.nnf()),
            Concept::Exists(role, c) => Concept::exists(role.clone(), c.nnf()),
            Concept::Forall(role, c) => Concept::forall(role.clone(), c.nnf()),
            Concept::Not(inner) => inner.negated_nnf(),
        }
    }

    /// `nnf(not self)` without building the intermediate node.
    fn negated_nnf(&self) -> Concept {
        match self {
            Concept::Top => Concept::Bottom,
            Concept::Bottom => Concept::Top,
            Concept::Atomic(_) => Concept::not(self.clone()),
            Concept::Not(inner) => inner.nnf(),
            Concept::And(l, r) => Concept::or(l.negated_nnf(), r.negated_nnf()),
            Concept::Or(l, r) => Concept::and(l.negated_nnf(), r.negated_nnf()),
            Concept::Exists(role, c) => Concept::forall(role.clone(), c.negated_nnf()),
            Concept::Forall(role, c) => Concept::exists(role.clone(), c.negated_nnf()),
        }
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            Concept::Top | Concept::Bottom | Concept::Atomic(_) => true,
            Concept::Not(inner) => matches!(**inner, Concept::Atomic(_)),
            Concept::And(l, r) | Concept::Or(l, r) => l.is_nnf() && r.is_nnf(),
            Concept::Exists(_, c) | Concept::Forall(_, c) => c.is_nnf(),
        }
    }

    fn collect_signature(&self, out: &mut BTreeSet<String>) {
        match self {
            Concept::Top | Concept::Bottom => {}
            Concept::Atomic(name) => {
                out.insert(name.clone());
            }
            Concept::Not(c) => c.collect_signature(out),
            Concept::And(l, r) | Concept::Or(l, r) => {
                l.collect_signature(out);
                r.collect_signature(out);
            }
            Concept::Exists(role, c) | Concept::Forall(role, c) => {
                out.insert(role.clone());
                c.collect_signature(out);
            }
        }
    }

    /// Binding strength used when printing: higher binds tighter.
    fn precedence(&self) -> u8 {
        match self {
            Concept::Or(..) => 1,
            Concept::And(..) => 2,
            Concept::Not(_) | Concept::Exists(..) | Concept::Forall(..) => 3,
            Concept::Top | Concept::Bottom | Concept::Atomic(_) => 4,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Concept::Top => f.write_str("Top"),
            Concept::Bottom => f.write_str("Bottom"),
            Concept::Atomic(name) => f.write_str(name),
            Concept::Not(c) => {
                f.write_str("not ")?;
                c.fmt_at(f, 3)
            }
            // The left operand of a binary node must bind strictly tighter so
            // that right nesting survives a print/parse round trip.
            Concept::And(l, r) => {
                l.fmt_at(f, 3)?;
                f.write_str(" and ")?;
                r.fmt_at(f, 2)
            }
            Concept::Or(l, r) => {
                l.fmt_at(f, 2)?;
                f.write_str(" or ")?;
                r.fmt_at(f, 1)
            }
            Concept::Exists(role, c) => {
                write!(f, "exists {role}. ")?;
                c.fmt_at(f, 3)
            }
            Concept::Forall(role, c) => {
                write!(f, "forall {role}. ")?;
                c.fmt_at(f, 3)
            }
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// A plain (unannotated) DL axiom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    /// General concept inclusion `sub <= sup`.
    SubClassOf { sub: Concept, sup: Concept },
    /// `individual : concept`
    ConceptAssertion {
        individual: String,
        concept: Concept,
    },
    /// `(subject, object) : role`
    RoleAssertion {
        subject: String,
        object: String,
        role: String,
    },
}

impl Axiom {
    pub fn subclass(sub: Concept, sup: Concept) -> Self {
        Axiom::SubClassOf { sub, sup }
    }

    pub fn instance(individual: impl Into<String>, concept: Concept) -> Self {
        Axiom::ConceptAssertion {
            individual: individual.into(),
            concept,
        }
    }

    pub fn role(
        subject: impl Into<String>,
        object: impl Into<String>,
        role: impl Into<String>,
    ) -> Self {
        Axiom::RoleAssertion {
            subject: subject.into(),
            object: object.into(),
            role: role.into(),
        }
    }

    /// Every concept name, role name and individual occurring in the axiom.
    pub fn signature(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        match self {
            Axiom::SubClassOf { sub, sup } => {
                sub.collect_signature(&mut out);
                sup.collect_signature(&mut out);
            }
            Axiom::ConceptAssertion {
                individual,
                concept,
            } => {
                out.insert(individual.clone());
                concept.collect_signature(&mut out);
            }
            Axiom::RoleAssertion {
                subject,
                object,
                role,
            } => {
                out.insert(subject.clone());
                out.insert(object.clone());
                out.insert(role.clone());
            }
        }
        out
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::SubClassOf { sub, sup } => write!(f, "{sub} <= {sup}"),
            Axiom::ConceptAssertion {
                individual,
                concept,
            } => write!(f, "{individual} : {concept}"),
            Axiom::RoleAssertion {
                subject,
                object,
                role,
            } => write!(f, "({subject}, {object}) : {role}"),
        }
    }
}

/// An axiom with an optional probability. `None` means the axiom is certain.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnotatedAxiom {
    pub axiom: Axiom,
    pub probability: Option<f64>,
}

impl AnnotatedAxiom {
    pub fn certain(axiom: Axiom) -> Self {
        AnnotatedAxiom {
            axiom,
            probability: None,
        }
    }

    /// Panics if `p` lies outside `[0, 1]`.
    pub fn probabilistic(p: f64, axiom: Axiom) -> Self {
        assert!((0.0..=1.0).contains(&p), "probability {p} outside [0, 1]");
        AnnotatedAxiom {
            axiom,
            probability: Some(p),
        }
    }

    pub fn is_probabilistic(&self) -> bool {
        self.probability.is_some()
    }
}

impl fmt::Display for AnnotatedAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.probability {
            // `{}` on f64 is the shortest decimal that parses back to the same value.
            Some(p) => write!(f, "{p} :: {}", self.axiom),
            None => write!(f, "{}", self.axiom),
        }
    }
}

/// Ordered axiom list with its certain / probabilistic split.
///
/// The probabilistic view keeps list order; the position of an axiom in
/// that view is its *ordinal*, which doubles as its Boolean variable.
#[derive(Clone, Debug, Default)]
pub struct KnowledgeBase {
    axioms: Vec<AnnotatedAxiom>,
    certain: Vec<usize>,
    probabilistic: Vec<usize>,
    ordinal_of: Vec<Option<usize>>,
}

impl PartialEq for KnowledgeBase {
    fn eq(&self, other: &Self) -> bool {
        self.axioms == other.axioms
    }
}

impl KnowledgeBase {
    pub fn new(axioms: Vec<AnnotatedAxiom>) -> Self {
        let mut certain = Vec::new();
        let mut probabilistic = Vec::new();
        let mut ordinal_of = Vec::with_capacity(axioms.len());
        for (i, ax) in axioms.iter().enumerate() {
            if ax.is_probabilistic() {
                ordinal_of.push(Some(probabilistic.len()));
                probabilistic.push(i);
            } else {
                ordinal_of.push(None);
                certain.push(i);
            }
        }
        KnowledgeBase {
            axioms,
            certain,
            probabilistic,
            ordinal_of,
        }
    }

    pub fn axioms(&self) -> &[AnnotatedAxiom] {
        &self.axioms
    }

    pub fn axiom(&self, index: usize) -> &AnnotatedAxiom {
        &self.axioms[index]
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    /// Indices of the certain axioms, ascending.
    pub fn certain_indices(&self) -> &[usize] {
        &self.certain
    }

    /// Axiom indices of the probabilistic axioms in ordinal order.
    pub fn probabilistic_indices(&self) -> &[usize] {
        &self.probabilistic
    }

    pub fn probabilistic_count(&self) -> usize {
        self.probabilistic.len()
    }

    /// Ordinal of axiom `index` in the probabilistic view, if it is probabilistic.
    pub fn ordinal_of(&self, index: usize) -> Option<usize> {
        self.ordinal_of.get(index).copied().flatten()
    }

    /// Probabilities indexed by ordinal.
    pub fn probabilities(&self) -> Vec<f64> {
        self.probabilistic
            .iter()
            .map(|&i| self.axioms[i].probability.expect("probabilistic view"))
            .collect()
    }
}

/// An entailment query.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Query {
    InstanceOf {
        individual: String,
        concept: Concept,
    },
    SubClassOf {
        sub: Concept,
        sup: Concept,
    },
}

impl Query {
    pub fn instance(individual: impl Into<String>, concept: Concept) -> Self {
        Query::InstanceOf {
            individual: individual.into(),
            concept,
        }
    }

    pub fn subclass(sub: Concept, sup: Concept) -> Self {
        Query::SubClassOf { sub, sup }
    }

    /// Names occurring in the query, used to seed black-box expansion.
    pub fn signature(&self) -> BTreeSet<String> {
        match self {
            Query::InstanceOf {
                individual,
                concept,
            } => Axiom::instance(individual.clone(), concept.clone()).signature(),
            Query::SubClassOf { sub, sup } => Axiom::subclass(sub.clone(), sup.clone()).signature(),
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::InstanceOf {
                individual,
                concept,
            } => write!(f, "{individual} : {concept}"),
            Query::SubClassOf { sub, sup } => write!(f, "{sub} <= {sup}"),
        }
    }
}

/// Subject of a refutation assertion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RefutationSubject {
    Named(String),
    /// A fresh individual that occurs in no knowledge base.
    Fresh,
}

/// Assertions whose addition makes the KB inconsistent exactly when it
/// entails `q`. Concepts are returned in NNF.
pub fn refutation_assertions(q: &Query) -> Vec<(RefutationSubject, Concept)> {
    match q {
        Query::InstanceOf {
            individual,
            concept,
        } => vec![(
            RefutationSubject::Named(individual.clone()),
            Concept::not(concept.clone()).nnf(),
        )],
        Query::SubClassOf { sub, sup } => vec![(
            RefutationSubject::Fresh,
            Concept::and(sub.clone(), Concept::not(sup.clone())).nnf(),
        )],
    }
}
