//! Knowledge-base generators: the layered benchmark family with `2^n`
//! justifications, and seeded random ALC knowledge bases for fuzzing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kb::{AnnotatedAxiom, Axiom, Concept, KnowledgeBase, Query};

/// Probability attached to every axiom of the layered family.
pub const SYNTHETIC_PROBABILITY: f64 = 0.6;

/// For `i = 1..=n`, in this order:
///
/// ```text
/// 0.6 :: B{i-1} <= P{i} and Q{i}
/// 0.6 :: P{i} <= B{i}
/// 0.6 :: Q{i} <= B{i}
/// ```
pub fn synthetic(n: usize) -> Result<KnowledgeBase> {
    if n < 1 {
        return Err(Error::InvalidArgument(
            "synthetic knowledge base needs n >= 1".into(),
        ));
    }
    let b = |i: usize| Concept::atomic(format!("B{i}"));
    let p = |i: usize| Concept::atomic(format!("P{i}"));
    let q = |i: usize| Concept::atomic(format!("Q{i}"));
    let prob = |ax| AnnotatedAxiom::probabilistic(SYNTHETIC_PROBABILITY, ax);
    let mut axioms = Vec::with_capacity(3 * n);
    for i in 1..=n {
        axioms.push(prob(Axiom::subclass(b(i - 1), Concept::and(p(i), q(i)))));
        axioms.push(prob(Axiom::subclass(p(i), b(i))));
        axioms.push(prob(Axiom::subclass(q(i), b(i))));
    }
    Ok(KnowledgeBase::new(axioms))
}

/// `B0 <= Bn`
pub fn synthetic_query(n: usize) -> Query {
    Query::subclass(Concept::atomic("B0"), Concept::atomic(format!("B{n}")))
}

/// Shape of random knowledge bases.
#[derive(Clone, Copy, Debug)]
pub struct RandomKbParams {
    pub max_axioms: usize,
    pub max_probabilistic: usize,
    pub concepts: usize,
    pub roles: usize,
    pub individuals: usize,
    pub max_depth: usize,
}

impl Default for RandomKbParams {
    fn default() -> Self {
        RandomKbParams {
            max_axioms: 10,
            max_probabilistic: 8,
            concepts: 4,
            roles: 2,
            individuals: 2,
            max_depth: 2,
        }
    }
}

const CONCEPT_NAMES: &[&str] = &["A", "B", "C", "D", "E", "F", "G", "H"];
const ROLE_NAMES: &[&str] = &["r", "s", "t", "u"];
const INDIVIDUAL_NAMES: &[&str] = &["a", "b", "c", "d"];

pub struct RandomKbGenerator {
    rng: ChaCha8Rng,
    params: RandomKbParams,
}

impl RandomKbGenerator {
    pub fn new(seed: u64, params: RandomKbParams) -> Self {
        let params = RandomKbParams {
            concepts: params.concepts.clamp(1, CONCEPT_NAMES.len()),
            roles: params.roles.clamp(1, ROLE_NAMES.len()),
            individuals: params.individuals.clamp(1, INDIVIDUAL_NAMES.len()),
            ..params
        };
        RandomKbGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            params,
        }
    }

    fn atom(&mut self) -> Concept {
        let names = &CONCEPT_NAMES[..self.params.concepts];
        Concept::atomic(*names.choose(&mut self.rng).unwrap())
    }

    fn role(&mut self) -> String {
        ROLE_NAMES[..self.params.roles]
            .choose(&mut self.rng)
            .unwrap()
            .to_string()
    }

    fn individual(&mut self) -> String {
        INDIVIDUAL_NAMES[..self.params.individuals]
            .choose(&mut self.rng)
            .unwrap()
            .to_string()
    }

    pub fn concept(&mut self, depth: usize) -> Concept {
        if depth == 0 || self.rng.gen_bool(0.45) {
            return match self.rng.gen_range(0..20) {
                0 => Concept::Top,
                1 => Concept::Bottom,
                2..=5 => Concept::not(self.atom()),
                _ => self.atom(),
            };
        }
        match self.rng.gen_range(0..5) {
            0 => Concept::and(self.concept(depth - 1), self.concept(depth - 1)),
            1 => Concept::or(self.concept(depth - 1), self.concept(depth - 1)),
            2 => Concept::exists(self.role(), self.concept(depth - 1)),
            3 => Concept::forall(self.role(), self.concept(depth - 1)),
            _ => Concept::not(self.concept(depth - 1)),
        }
    }

    pub fn axiom(&mut self) -> Axiom {
        let depth = self.params.max_depth;
        match self.rng.gen_range(0..10) {
            // Atomic inclusions keep entailment chains likely.
            0..=2 => Axiom::subclass(self.atom(), self.atom()),
            3..=5 => {
                let (sub, sup) = (self.concept(depth), self.concept(depth));
                Axiom::subclass(sub, sup)
            }
            6..=8 => {
                let ind = self.individual();
                Axiom::instance(ind, self.concept(depth))
            }
            _ => {
                let (s, o) = (self.individual(), self.individual());
                Axiom::role(s, o, self.role())
            }
        }
    }

    pub fn kb(&mut self) -> KnowledgeBase {
        let n = self.rng.gen_range(1..=self.params.max_axioms.max(1));
        let mut prob_left = self.params.max_probabilistic;
        let axioms = (0..n)
            .map(|_| {
                let axiom = self.axiom();
                if prob_left > 0 && self.rng.gen_bool(0.75) {
                    prob_left -= 1;
                    AnnotatedAxiom::probabilistic(self.rng.gen::<f64>(), axiom)
                } else {
                    AnnotatedAxiom::certain(axiom)
                }
            })
            .collect();
        KnowledgeBase::new(axioms)
    }

    pub fn query(&mut self) -> Query {
        match self.rng.gen_range(0..4) {
            0 => Query::subclass(self.atom(), self.atom()),
            1 => {
                let ind = self.individual();
                Query::instance(ind, self.concept(1))
            }
            _ => {
                let ind = self.individual();
                Query::instance(ind, self.atom())
            }
        }
    }
}

/// A random knowledge base and query, fully determined by `seed`.
pub fn random_instance(seed: u64, params: RandomKbParams) -> (KnowledgeBase, Query) {
    let mut g = RandomKbGenerator::new(seed, params);
    let kb = g.kb();
    let q = g.query();
    (kb, q)
}
