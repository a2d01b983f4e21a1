//! Distribution semantics over probabilistic axioms: composite choices,
//! worlds, brute-force query probability and the justification/BDD
//! pipeline.
//!
//! Every probabilistic axiom is an independent Boolean random variable. A
//! world keeps all certain axioms and the probabilistic axioms whose variable
//! is true; the probability of a query is the total weight of the worlds that
//! entail it.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use clap::ValueEnum;
use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::bdd::{BddManager, BddRef};
use crate::error::{Error, Result, SearchStats};
use crate::justify::{Budget, CoveringSet, Justifier, Method};
use crate::kb::{KnowledgeBase, Query};
use crate::pinpoint::{formula_from_justifications, MonotoneFormula};
use crate::tableau::Reasoner;

pub const DEFAULT_WORLD_LIMIT: usize = 20;

/// Decision about one probabilistic axiom, by ordinal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomicChoice {
    pub ordinal: usize,
    pub selected: bool,
}

impl AtomicChoice {
    pub fn new(ordinal: usize, selected: bool) -> Self {
        AtomicChoice { ordinal, selected }
    }
}

/// A consistent set of atomic choices: at most one decision per ordinal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CompositeChoice(BTreeMap<usize, bool>);

impl CompositeChoice {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_choices(choices: impl IntoIterator<Item = AtomicChoice>) -> Result<Self> {
        let mut c = CompositeChoice::new();
        for a in choices {
            c.insert(a)?;
        }
        Ok(c)
    }

    /// Fails if the ordinal already carries the opposite decision.
    pub fn insert(&mut self, choice: AtomicChoice) -> Result<()> {
        match self.0.get(&choice.ordinal) {
            Some(&k) if k != choice.selected => Err(Error::InconsistentChoice(choice.ordinal)),
            _ => {
                self.0.insert(choice.ordinal, choice.selected);
                Ok(())
            }
        }
    }

    pub fn get(&self, ordinal: usize) -> Option<bool> {
        self.0.get(&ordinal).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = AtomicChoice> + '_ {
        self.0.iter().map(|(&o, &k)| AtomicChoice::new(o, k))
    }

    /// Incompatible choices disagree on some shared ordinal.
    pub fn is_incompatible_with(&self, other: &CompositeChoice) -> bool {
        self.0
            .iter()
            .any(|(o, k)| other.0.get(o).is_some_and(|k2| k2 != k))
    }
}

/// `prod p_i` over selected ordinals times `prod (1 - p_i)` over rejected ones.
pub fn choice_probability(c: &CompositeChoice, kb: &KnowledgeBase) -> Result<f64> {
    let probs = kb.probabilities();
    c.iter().try_fold(1.0, |acc, a| {
        let p = *probs.get(a.ordinal).ok_or(Error::OrdinalOutOfRange {
            ordinal: a.ordinal,
            count: probs.len(),
        })?;
        Ok(acc * if a.selected { p } else { 1.0 - p })
    })
}

/// A total selection over the probabilistic axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct World {
    selection: CompositeChoice,
}

impl World {
    pub fn selection(&self) -> &CompositeChoice {
        &self.selection
    }

    /// Axiom indices of the world: every certain axiom plus the selected
    /// probabilistic ones, ascending.
    pub fn axioms(&self, kb: &KnowledgeBase) -> Vec<usize> {
        let mut out: Vec<usize> = kb.certain_indices().to_vec();
        out.extend(
            self.selection
                .iter()
                .filter(|a| a.selected)
                .map(|a| kb.probabilistic_indices()[a.ordinal]),
        );
        out.sort_unstable();
        out
    }
}

/// Iterator over all `2^m` worlds with their probabilities. World `k`
/// selects ordinal `i` iff bit `i` of `k` is set.
pub struct Worlds {
    probs: Vec<f64>,
    next: u64,
    end: u64,
}

impl Iterator for Worlds {
    type Item = (World, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let bits = self.next;
        self.next += 1;
        let mut selection = CompositeChoice::new();
        let mut weight = 1.0;
        for (i, &p) in self.probs.iter().enumerate() {
            let on = bits >> i & 1 == 1;
            selection.0.insert(i, on);
            weight *= if on { p } else { 1.0 - p };
        }
        Some((World { selection }, weight))
    }
}

pub fn enumerate_worlds(kb: &KnowledgeBase, limit: usize) -> Result<Worlds> {
    let m = kb.probabilistic_count();
    if m > limit || m >= 63 {
        return Err(Error::TooManyWorlds { count: m, limit });
    }
    Ok(Worlds {
        probs: kb.probabilities(),
        next: 0,
        end: 1u64 << m,
    })
}

/// Sum of the weights of the worlds entailing `q`.
pub fn probability_bruteforce(
    kb: &KnowledgeBase,
    q: &Query,
    world_limit: usize,
    budget: &Budget,
) -> Result<f64> {
    let worlds = enumerate_worlds(kb, world_limit)?;
    let mut reasoner = Reasoner::new(kb, budget.start());
    let goal = reasoner.goal(q);
    let mut total = 0.0;
    for (world, weight) in worlds {
        let mask = reasoner.mask_of(world.axioms(kb));
        if reasoner.entails(&mask, &goal)? {
            total += weight;
        }
    }
    Ok(total)
}

/// Where the query probability comes from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Justifications compiled into a decision diagram.
    #[default]
    Bdd,
    /// Enumeration of every world.
    #[value(name = "bruteforce")]
    BruteForce,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Bdd => "bdd",
            Engine::BruteForce => "bruteforce",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QueryConfig {
    pub method: Method,
    pub engine: Engine,
    pub budget: Budget,
    pub world_limit: usize,
}

impl Default for QueryConfig {
    fn default() -> Self {
        QueryConfig {
            method: Method::default(),
            engine: Engine::default(),
            budget: Budget::default(),
            world_limit: DEFAULT_WORLD_LIMIT,
        }
    }
}

/// The compiled diagram of a query.
#[derive(Clone, Debug)]
pub struct Diagram {
    pub manager: BddManager,
    pub root: BddRef,
}

impl Diagram {
    pub fn node_count(&self) -> usize {
        self.manager.node_count(self.root)
    }

    /// Root-to-1 paths read as composite choices.
    pub fn explanations(&self) -> Vec<CompositeChoice> {
        self.manager
            .one_paths(self.root)
            .into_iter()
            .map(|path| CompositeChoice(path.into_iter().collect()))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct QueryResult {
    pub probability: f64,
    /// Absent for the brute-force engine.
    pub covering_set: Option<CoveringSet>,
    pub formula: Option<MonotoneFormula>,
    pub diagram: Option<Diagram>,
    pub stats: SearchStats,
    pub elapsed: Duration,
}

impl QueryResult {
    pub fn bdd_nodes(&self) -> Option<usize> {
        self.diagram.as_ref().map(Diagram::node_count)
    }
}

/// Query probability: all justifications, their pinpointing formula, its
/// decision diagram, and the weighted traversal of that diagram.
pub fn probability_query(
    kb: &KnowledgeBase,
    q: &Query,
    config: &QueryConfig,
) -> Result<QueryResult> {
    let start = Instant::now();
    if config.engine == Engine::BruteForce {
        let probability = probability_bruteforce(kb, q, config.world_limit, &config.budget)?;
        return Ok(QueryResult {
            probability,
            covering_set: None,
            formula: None,
            diagram: None,
            stats: SearchStats::default(),
            elapsed: start.elapsed(),
        });
    }

    let justifier = Justifier::new(kb, q, config.method, &config.budget);
    let covering = justifier.all()?;
    let formula = formula_from_justifications(&covering, kb);
    let mut manager = BddManager::new(kb.probabilistic_count());
    let root = manager.build(&formula)?;
    let probability = manager.probability(root, &kb.probabilities())?;
    Ok(QueryResult {
        probability,
        stats: covering.stats,
        covering_set: Some(covering),
        formula: Some(formula),
        diagram: Some(Diagram { manager, root }),
        elapsed: start.elapsed(),
    })
}

/// Consistency of the whole knowledge base, every probabilistic axiom included.
pub fn kb_is_consistent(kb: &KnowledgeBase, budget: &Budget) -> Result<bool> {
    let reasoner = Reasoner::new(kb, budget.start());
    let mut mask = FixedBitSet::with_capacity(kb.len());
    mask.insert_range(..);
    reasoner.is_consistent(&mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_kb, parse_query};

    fn crime() -> KnowledgeBase {
        parse_kb(
            "0.2 :: Nihilist <= GreatMan\n\
             exists killed. Top <= Nihilist\n\
             0.6 :: (raskolnikov, alyona) : killed\n\
             0.7 :: (raskolnikov, lizaveta) : killed\n",
        )
        .unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn choice_probabilities() {
        let kb = crime();
        let all =
            CompositeChoice::from_choices((0..3).map(|o| AtomicChoice::new(o, true))).unwrap();
        assert!(close(choice_probability(&all, &kb).unwrap(), 0.084, 1e-12));
        assert_eq!(
            choice_probability(&CompositeChoice::new(), &kb).unwrap(),
            1.0
        );
        let off = CompositeChoice::from_choices([AtomicChoice::new(0, false)]).unwrap();
        assert!(close(choice_probability(&off, &kb).unwrap(), 0.8, 1e-12));
    }

    #[test]
    fn composite_choice_consistency() {
        let mut c = CompositeChoice::new();
        c.insert(AtomicChoice::new(1, true)).unwrap();
        c.insert(AtomicChoice::new(1, true)).unwrap();
        assert!(matches!(
            c.insert(AtomicChoice::new(1, false)),
            Err(Error::InconsistentChoice(1))
        ));
        let other = CompositeChoice::from_choices([AtomicChoice::new(1, false)]).unwrap();
        assert!(c.is_incompatible_with(&other));
        assert!(!c.is_incompatible_with(&CompositeChoice::new()));
    }

    #[test]
    fn worlds_of_crime_kb() {
        let kb = crime();
        let worlds: Vec<_> = enumerate_worlds(&kb, DEFAULT_WORLD_LIMIT)
            .unwrap()
            .collect();
        assert_eq!(worlds.len(), 8);
        let total: f64 = worlds.iter().map(|(_, w)| w).sum();
        assert!(close(total, 1.0, 1e-9));
        // World 0b101 selects ordinals 0 and 2: axioms 0, 3 plus certain axiom 1.
        assert_eq!(worlds[5].0.axioms(&kb), vec![0, 1, 3]);
    }

    #[test]
    fn certain_only_kb_has_one_world() {
        let kb = parse_kb("a : A").unwrap();
        let worlds: Vec<_> = enumerate_worlds(&kb, DEFAULT_WORLD_LIMIT)
            .unwrap()
            .collect();
        assert_eq!(worlds.len(), 1);
        assert_eq!(worlds[0].1, 1.0);
        let q = parse_query("a : A").unwrap();
        let p = probability_bruteforce(&kb, &q, DEFAULT_WORLD_LIMIT, &Budget::default()).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn world_limit() {
        let kb = crime();
        assert!(matches!(
            enumerate_worlds(&kb, 2),
            Err(Error::TooManyWorlds { count: 3, limit: 2 })
        ));
    }

    #[test]
    fn crime_probability_both_engines() {
        let kb = crime();
        let q = parse_query("raskolnikov : GreatMan").unwrap();
        let brute =
            probability_bruteforce(&kb, &q, DEFAULT_WORLD_LIMIT, &Budget::default()).unwrap();
        assert!(close(brute, 0.176, 1e-12));
        let r = probability_query(&kb, &q, &QueryConfig::default()).unwrap();
        assert!(close(r.probability, 0.176, 1e-12));
        assert_eq!(r.covering_set.as_ref().unwrap().len(), 2);
        assert_eq!(r.bdd_nodes(), Some(3));
    }

    #[test]
    fn unentailed_query_has_zero_probability() {
        let kb = crime();
        let q = parse_query("alyona : GreatMan").unwrap();
        let r = probability_query(&kb, &q, &QueryConfig::default()).unwrap();
        assert_eq!(r.probability, 0.0);
        assert!(r.covering_set.unwrap().is_empty());
        assert_eq!(r.formula, Some(MonotoneFormula::False));
        let brute =
            probability_bruteforce(&kb, &q, DEFAULT_WORLD_LIMIT, &Budget::default()).unwrap();
        assert_eq!(brute, 0.0);
    }

    #[test]
    fn single_layer_synthetic() {
        let kb = parse_kb("0.6 :: B0 <= P1 and Q1\n0.6 :: P1 <= B1\n0.6 :: Q1 <= B1").unwrap();
        let q = parse_query("B0 <= B1").unwrap();
        let expected = 0.6 * (0.6 + 0.6 - 0.36);
        let r = probability_query(&kb, &q, &QueryConfig::default()).unwrap();
        assert!(close(r.probability, expected, 1e-12));
        let b = probability_bruteforce(&kb, &q, DEFAULT_WORLD_LIMIT, &Budget::default()).unwrap();
        assert!(close(b, expected, 1e-12));
    }

    #[test]
    fn explanations_are_pairwise_incompatible() {
        let kb = crime();
        let q = parse_query("raskolnikov : GreatMan").unwrap();
        let r = probability_query(&kb, &q, &QueryConfig::default()).unwrap();
        let expl = r.diagram.unwrap().explanations();
        assert_eq!(expl.len(), 2);
        assert!(expl[0].is_incompatible_with(&expl[1]));
        let sum: f64 = expl
            .iter()
            .map(|c| choice_probability(c, &kb).unwrap())
            .sum();
        assert!(close(sum, 0.176, 1e-12));
    }
}
