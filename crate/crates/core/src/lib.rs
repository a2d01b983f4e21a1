//! Exact probabilistic reasoning over ALC knowledge bases whose axioms carry
//! independent probabilities.
//!
//! The query pipeline finds every justification of the query with a hitting
//! set tree over a tracing tableau, turns the covering set into a monotone
//! formula over the probabilistic axioms, compiles it to a reduced ordered
//! BDD and reads the probability off the diagram. A world-enumeration
//! oracle computes the same number by brute force.
//!
//! ```
//! use probdl::{parse_kb, parse_query, probability_query, QueryConfig};
//!
//! let kb = parse_kb(
//!     "0.2 :: Nihilist <= GreatMan\n\
//!      exists killed. Top <= Nihilist\n\
//!      0.6 :: (raskolnikov, alyona) : killed\n\
//!      0.7 :: (raskolnikov, lizaveta) : killed\n",
//! )
//! .unwrap();
//! let q = parse_query("raskolnikov : GreatMan").unwrap();
//! let result = probability_query(&kb, &q, &QueryConfig::default()).unwrap();
//! assert!((result.probability - 0.176).abs() < 1e-12);
//! ```

pub mod bdd;
pub mod cli;
pub mod error;
pub mod generate;
pub mod justify;
pub mod kb;
pub mod parser;
pub mod pinpoint;
pub mod semantics;
pub mod tableau;

pub use bdd::{BddManager, BddRef};
pub use error::{Error, Limit, Result, SearchStats};
pub use justify::{
    all_justifications, minimize, single_justification, Budget, CoveringSet, Justification,
    Justifier, Method,
};
pub use kb::{refutation_assertions, AnnotatedAxiom, Axiom, Concept, KnowledgeBase, Query};
pub use parser::{parse_kb, parse_query, serialize_kb, ParseError};
pub use pinpoint::{formula_from_justifications, satisfies, MonotoneFormula, Valuation};
pub use semantics::{
    choice_probability, enumerate_worlds, probability_bruteforce, probability_query, AtomicChoice,
    CompositeChoice, Engine, QueryConfig, QueryResult, World,
};
pub use tableau::{entails, is_consistent, trace_entailment, Limits, Reasoner};
