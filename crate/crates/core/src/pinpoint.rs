//! Monotone pinpointing formulas over probabilistic-axiom variables.
//!
//! Variables are the 0-based ordinals of the knowledge base's probabilistic
//! view. Text rendering is 1-based (`x1` is ordinal 0).

use std::collections::BTreeSet;
use std::fmt;

use crate::justify::CoveringSet;
use crate::kb::KnowledgeBase;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MonotoneFormula {
    True,
    False,
    Var(usize),
    And(Vec<MonotoneFormula>),
    Or(Vec<MonotoneFormula>),
}

/// The set of variable ordinals assigned true.
pub type Valuation = BTreeSet<usize>;

impl MonotoneFormula {
    pub fn satisfies(&self, v: &Valuation) -> bool {
        match self {
            MonotoneFormula::True => true,
            MonotoneFormula::False => false,
            MonotoneFormula::Var(i) => v.contains(i),
            MonotoneFormula::And(fs) => fs.iter().all(|f| f.satisfies(v)),
            MonotoneFormula::Or(fs) => fs.iter().any(|f| f.satisfies(v)),
        }
    }

    /// Largest ordinal mentioned, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            MonotoneFormula::True | MonotoneFormula::False => None,
            MonotoneFormula::Var(i) => Some(*i),
            MonotoneFormula::And(fs) | MonotoneFormula::Or(fs) => {
                fs.iter().filter_map(MonotoneFormula::max_var).max()
            }
        }
    }

    fn fmt_inner(&self, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
        match self {
            MonotoneFormula::True => f.write_str("true"),
            MonotoneFormula::False => f.write_str("false"),
            MonotoneFormula::Var(i) => write!(f, "x{}", i + 1),
            MonotoneFormula::And(fs) | MonotoneFormula::Or(fs) => {
                let (op, empty) = match self {
                    MonotoneFormula::And(_) => (" & ", "true"),
                    _ => (" | ", "false"),
                };
                match fs.len() {
                    0 => f.write_str(empty),
                    1 => fs[0].fmt_inner(f, nested),
                    _ => {
                        if nested {
                            f.write_str("(")?;
                        }
                        for (k, sub) in fs.iter().enumerate() {
                            if k > 0 {
                                f.write_str(op)?;
                            }
                            sub.fmt_inner(f, true)?;
                        }
                        if nested {
                            f.write_str(")")?;
                        }
                        Ok(())
                    }
                }
            }
        }
    }
}

impl fmt::Display for MonotoneFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_inner(f, false)
    }
}

/// Disjunction over justifications of the conjunction of their probabilistic
/// axioms. Certain axioms are dropped, so a justification made only of
/// certain axioms contributes `True`; no justifications gives `False`.
pub fn formula_from_justifications(cs: &CoveringSet, kb: &KnowledgeBase) -> MonotoneFormula {
    if cs.is_empty() {
        return MonotoneFormula::False;
    }
    let disjuncts = cs
        .iter()
        .map(|j| {
            let vars: Vec<MonotoneFormula> = j
                .iter()
                .filter_map(|i| kb.ordinal_of(i))
                .map(MonotoneFormula::Var)
                .collect();
            if vars.is_empty() {
                MonotoneFormula::True
            } else {
                MonotoneFormula::And(vars)
            }
        })
        .collect();
    MonotoneFormula::Or(disjuncts)
}

pub fn satisfies(f: &MonotoneFormula, v: &Valuation) -> bool {
    f.satisfies(v)
}
