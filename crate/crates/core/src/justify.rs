//! Justification finding: single justifications by glass-box tracing or
//! black-box expand/contract, and the full covering set through Reiter's
//! hitting set tree.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use clap::ValueEnum;
use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Limit, Result, SearchStats};
use crate::kb::{KnowledgeBase, Query};
use crate::tableau::{Goal, Limits, Reasoner, DEFAULT_NODE_BUDGET};

pub const DEFAULT_HST_BUDGET: usize = 100_000;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(600);

/// How a single justification is extracted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Minimize the axiom trace of one tableau refutation.
    #[default]
    #[value(name = "glassbox")]
    GlassBox,
    /// Grow a signature-connected working set until it entails the query,
    /// then minimize it with the tableau used as an opaque oracle.
    #[value(name = "blackbox")]
    BlackBox,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::GlassBox => "glassbox",
            Method::BlackBox => "blackbox",
        })
    }
}

/// Resource limits for one query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub timeout: Option<Duration>,
    pub max_tableau_nodes: usize,
    pub max_hst_nodes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            timeout: Some(DEFAULT_TIMEOUT),
            max_tableau_nodes: DEFAULT_NODE_BUDGET,
            max_hst_nodes: DEFAULT_HST_BUDGET,
        }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            timeout: None,
            max_tableau_nodes: usize::MAX,
            max_hst_nodes: usize::MAX,
        }
    }

    /// Tableau limits with the deadline counted from now.
    pub fn start(&self) -> Limits {
        Limits {
            max_nodes: self.max_tableau_nodes,
            deadline: self.timeout.map(|t| Instant::now() + t),
        }
    }
}

/// A subset-minimal set of axiom indices entailing the query.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Justification(BTreeSet<usize>);

impl Justification {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        Justification(indices.into_iter().collect())
    }

    pub fn indices(&self) -> &BTreeSet<usize> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.contains(&index)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    fn from_mask(mask: &FixedBitSet) -> Self {
        Justification(mask.ones().collect())
    }
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// All justifications of a query, sorted, with search statistics.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoveringSet {
    pub justifications: Vec<Justification>,
    pub stats: SearchStats,
}

impl CoveringSet {
    pub fn len(&self) -> usize {
        self.justifications.len()
    }

    pub fn is_empty(&self) -> bool {
        self.justifications.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Justification> {
        self.justifications.iter()
    }
}

/// Justification search for one query over one knowledge base.
pub struct Justifier<'kb> {
    kb: &'kb KnowledgeBase,
    reasoner: Reasoner,
    goal: Goal,
    query: Query,
    method: Method,
    max_hst_nodes: usize,
}

impl<'kb> Justifier<'kb> {
    pub fn new(kb: &'kb KnowledgeBase, q: &Query, method: Method, budget: &Budget) -> Self {
        let mut reasoner = Reasoner::new(kb, budget.start());
        let goal = reasoner.goal(q);
        Justifier {
            kb,
            reasoner,
            goal,
            query: q.clone(),
            method,
            max_hst_nodes: budget.max_hst_nodes,
        }
    }

    pub fn tableau_calls(&self) -> usize {
        self.reasoner.calls()
    }

    fn full(&self) -> FixedBitSet {
        self.reasoner.full_mask()
    }

    fn entails(&self, mask: &FixedBitSet) -> Result<bool> {
        self.reasoner.entails(mask, &self.goal)
    }

    /// Linear deletion in ascending index order.
    pub fn minimize(&self, candidate: &FixedBitSet) -> Result<FixedBitSet> {
        if !self.entails(candidate)? {
            return Err(Error::Precondition(format!(
                "candidate set does not entail `{}`",
                self.query
            )));
        }
        self.contract(candidate.clone())
    }

    fn contract(&self, mut set: FixedBitSet) -> Result<FixedBitSet> {
        let members: Vec<usize> = set.ones().collect();
        for i in members {
            set.set(i, false);
            if !self.entails(&set)? {
                set.insert(i);
            }
        }
        Ok(set)
    }

    /// One justification drawn from `available`, or `None` if `available`
    /// does not entail the query.
    pub fn single(&self, available: &FixedBitSet) -> Result<Option<FixedBitSet>> {
        match self.method {
            Method::GlassBox => match self.reasoner.trace(available, &self.goal)? {
                None => Ok(None),
                Some(mut trace) => {
                    trace.grow(self.kb.len());
                    self.minimize(&trace).map(Some)
                }
            },
            Method::BlackBox => {
                if !self.entails(available)? {
                    return Ok(None);
                }
                let expanded = self.expand(available)?;
                self.contract(expanded).map(Some)
            }
        }
    }

    /// Signature-connectivity waves starting from the query signature; falls
    /// back to all of `available` if the connected part does not suffice.
    fn expand(&self, available: &FixedBitSet) -> Result<FixedBitSet> {
        let mut signature = self.query.signature();
        let mut work = FixedBitSet::with_capacity(self.kb.len());
        loop {
            let wave: Vec<usize> = available
                .ones()
                .filter(|&i| !work.contains(i))
                .filter(|&i| {
                    let sig = self.kb.axiom(i).axiom.signature();
                    !sig.is_disjoint(&signature)
                })
                .collect();
            if wave.is_empty() {
                return Ok(available.clone());
            }
            for i in wave {
                work.insert(i);
                signature.extend(self.kb.axiom(i).axiom.signature());
            }
            if self.entails(&work)? {
                return Ok(work);
            }
        }
    }

    /// Reiter's hitting set tree, breadth first. Edges remove one axiom of
    /// the parent's justification in ascending order. A node whose removal
    /// path was already seen, or contains the path of a node that found no
    /// justification, is pruned; a known justification disjoint from the
    /// path is reused without calling the reasoner.
    pub fn all(&self) -> Result<CoveringSet> {
        let with_stats = |e: Error, hst_nodes: usize| match e {
            Error::Exhausted { limit, .. } => Error::Exhausted {
                limit,
                stats: SearchStats {
                    tableau_calls: self.tableau_calls(),
                    hst_nodes,
                },
            },
            other => other,
        };

        let full = self.full();
        let Some(root) = self.single(&full).map_err(|e| with_stats(e, 1))? else {
            return Ok(CoveringSet {
                justifications: Vec::new(),
                stats: SearchStats {
                    tableau_calls: self.tableau_calls(),
                    hst_nodes: 1,
                },
            });
        };

        let mut found = vec![root];
        let mut closed: Vec<FixedBitSet> = Vec::new();
        let mut seen: HashSet<FixedBitSet> = HashSet::new();
        let mut queue: VecDeque<(FixedBitSet, usize)> = VecDeque::new();
        queue.push_back((FixedBitSet::with_capacity(self.kb.len()), 0));
        let mut nodes = 1usize;

        while let Some((path, label)) = queue.pop_front() {
            let edges: Vec<usize> = found[label].ones().collect();
            for axiom in edges {
                self.reasoner
                    .limits()
                    .check_deadline()
                    .map_err(|e| with_stats(e, nodes))?;
                let mut child = path.clone();
                child.insert(axiom);
                if !seen.insert(child.clone()) {
                    continue;
                }
                if closed.iter().any(|c| c.is_subset(&child)) {
                    continue;
                }
                nodes += 1;
                if nodes > self.max_hst_nodes {
                    return Err(with_stats(
                        Error::exhausted(Limit::HstNodes(self.max_hst_nodes)),
                        nodes,
                    ));
                }
                if let Some(k) = found.iter().position(|j| j.is_disjoint(&child)) {
                    queue.push_back((child, k));
                    continue;
                }
                let mut available = full.clone();
                available.difference_with(&child);
                match self.single(&available).map_err(|e| with_stats(e, nodes))? {
                    Some(j) => {
                        found.push(j);
                        queue.push_back((child, found.len() - 1));
                    }
                    None => closed.push(child),
                }
            }
        }

        let mut justifications: Vec<Justification> =
            found.iter().map(Justification::from_mask).collect();
        justifications.sort();
        Ok(CoveringSet {
            justifications,
            stats: SearchStats {
                tableau_calls: self.tableau_calls(),
                hst_nodes: nodes,
            },
        })
    }
}

/// Shrinks an entailing candidate set to a justification.
pub fn minimize(
    kb: &KnowledgeBase,
    candidate: &BTreeSet<usize>,
    q: &Query,
    budget: &Budget,
) -> Result<Justification> {
    let j = Justifier::new(kb, q, Method::BlackBox, budget);
    if let Some(&bad) = candidate.iter().find(|&&i| i >= kb.len()) {
        return Err(Error::InvalidArgument(format!(
            "axiom index {bad} out of range"
        )));
    }
    let mask = j.reasoner.mask_of(candidate.iter().copied());
    j.minimize(&mask).map(|m| Justification::from_mask(&m))
}

/// One justification of `q` over the whole knowledge base.
pub fn single_justification(
    kb: &KnowledgeBase,
    q: &Query,
    method: Method,
    budget: &Budget,
) -> Result<Justification> {
    let j = Justifier::new(kb, q, method, budget);
    match j.single(&j.full())? {
        Some(m) => Ok(Justification::from_mask(&m)),
        None => Err(Error::NotEntailed),
    }
}

/// Every justification of `q`; empty when `q` is not entailed.
pub fn all_justifications(
    kb: &KnowledgeBase,
    q: &Query,
    method: Method,
    budget: &Budget,
) -> Result<CoveringSet> {
    Justifier::new(kb, q, method, budget).all()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_kb, parse_query};

    const CRIME: &str = "Nihilist <= GreatMan\n\
                         exists killed. Top <= Nihilist\n\
                         (raskolnikov, alyona) : killed\n\
                         (raskolnikov, lizaveta) : killed\n";

    fn just(xs: &[usize]) -> Justification {
        Justification::new(xs.iter().copied())
    }

    fn budget() -> Budget {
        Budget::default()
    }

    #[test]
    fn minimize_by_ascending_deletion() {
        let kb = parse_kb(CRIME).unwrap();
        let q = parse_query("raskolnikov : GreatMan").unwrap();
        let all: BTreeSet<usize> = (0..4).collect();
        assert_eq!(
            minimize(&kb, &all, &q, &budget()).unwrap(),
            just(&[0, 1, 3])
        );
        let minimal: BTreeSet<usize> = [0, 1, 2].into();
        assert_eq!(
            minimize(&kb, &minimal, &q, &budget()).unwrap(),
            just(&[0, 1, 2])
        );
        let short: BTreeSet<usize> = [0, 1].into();
        assert!(matches!(
            minimize(&kb, &short, &q, &budget()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn minimize_singleton() {
        let kb = parse_kb("a : A").unwrap();
        let q = parse_query("a : A").unwrap();
        assert_eq!(
            minimize(&kb, &[0].into(), &q, &budget()).unwrap(),
            just(&[0])
        );
    }

    #[test]
    fn single_justification_both_methods() {
        let kb = parse_kb(CRIME).unwrap();
        let q = parse_query("raskolnikov : GreatMan").unwrap();
        let expected = [just(&[0, 1, 2]), just(&[0, 1, 3])];
        let glass = single_justification(&kb, &q, Method::GlassBox, &budget()).unwrap();
        assert_eq!(glass, just(&[0, 1, 2]));
        let black = single_justification(&kb, &q, Method::BlackBox, &budget()).unwrap();
        assert!(expected.contains(&black));
    }

    #[test]
    fn single_justification_not_entailed() {
        let kb = parse_kb("a : A").unwrap();
        let q = parse_query("a : B").unwrap();
        for m in [Method::GlassBox, Method::BlackBox] {
            assert!(matches!(
                single_justification(&kb, &q, m, &budget()),
                Err(Error::NotEntailed)
            ));
        }
    }

    #[test]
    fn blackbox_reaches_disconnected_contradiction() {
        // The inconsistency shares no names with the query.
        let kb = parse_kb("a : A\nb : B\nb : not B").unwrap();
        let q = parse_query("a : Z").unwrap();
        let j = single_justification(&kb, &q, Method::BlackBox, &budget()).unwrap();
        assert_eq!(j, just(&[1, 2]));
    }

    #[test]
    fn crime_covering_set() {
        let kb = parse_kb(CRIME).unwrap();
        let q = parse_query("raskolnikov : GreatMan").unwrap();
        for m in [Method::GlassBox, Method::BlackBox] {
            let cs = all_justifications(&kb, &q, m, &budget()).unwrap();
            assert_eq!(cs.justifications, vec![just(&[0, 1, 2]), just(&[0, 1, 3])]);
            assert!(cs.stats.tableau_calls > 0);
            assert!(cs.stats.hst_nodes >= 3);
        }
    }

    #[test]
    fn unrelated_query_has_empty_covering_set() {
        let kb = parse_kb("0.5 :: a : A").unwrap();
        let q = parse_query("a : B").unwrap();
        let cs = all_justifications(&kb, &q, Method::GlassBox, &budget()).unwrap();
        assert!(cs.is_empty());
    }

    #[test]
    fn layered_chain_has_exponentially_many() {
        let kb = parse_kb(
            "0.6 :: B0 <= P1 and Q1\n0.6 :: P1 <= B1\n0.6 :: Q1 <= B1\n\
             0.6 :: B1 <= P2 and Q2\n0.6 :: P2 <= B2\n0.6 :: Q2 <= B2\n",
        )
        .unwrap();
        let q = parse_query("B0 <= B2").unwrap();
        let cs = all_justifications(&kb, &q, Method::GlassBox, &budget()).unwrap();
        assert_eq!(cs.len(), 4);
    }

    #[test]
    fn hst_budget_reports_partial_stats() {
        let kb = parse_kb(CRIME).unwrap();
        let q = parse_query("raskolnikov : GreatMan").unwrap();
        let tight = Budget {
            max_hst_nodes: 2,
            ..Budget::default()
        };
        match all_justifications(&kb, &q, Method::GlassBox, &tight) {
            Err(Error::Exhausted {
                limit: Limit::HstNodes(2),
                stats,
            }) => {
                assert_eq!(stats.hst_nodes, 3);
                assert!(stats.tableau_calls > 0);
            }
            other => panic!("expected HST budget error, got {other:?}"),
        }
    }
}
