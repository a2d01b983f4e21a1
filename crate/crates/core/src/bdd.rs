//! Reduced ordered binary decision diagrams.
//!
//! Nodes are hash-consed in a unique table, so two references denote the
//! same Boolean function exactly when they are equal. The variable order is
//! the ordinal order of the probabilistic axioms. There are no complement
//! edges and no garbage collection.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pinpoint::{MonotoneFormula, Valuation};

/// Handle to a node of one [`BddManager`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BddRef(u32);

impl BddRef {
    pub const FALSE: BddRef = BddRef(0);
    pub const TRUE: BddRef = BddRef(1);

    pub fn is_terminal(self) -> bool {
        self.0 < 2
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

const TERMINAL_LEVEL: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct NodeData {
    level: usize,
    low: BddRef,
    high: BddRef,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
}

/// An internal node as seen from outside the manager.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeView {
    pub level: usize,
    pub low: BddRef,
    pub high: BddRef,
}

/// Result of the weighted traversal, with the value of every visited node.
#[derive(Clone, Debug)]
pub struct Traversal {
    pub probability: f64,
    pub values: HashMap<BddRef, f64>,
}

#[derive(Clone, Debug)]
pub struct BddManager {
    num_vars: usize,
    nodes: Vec<NodeData>,
    unique: HashMap<NodeData, BddRef>,
    cache: HashMap<(Op, BddRef, BddRef), BddRef>,
    not_cache: HashMap<BddRef, BddRef>,
}

impl BddManager {
    pub fn new(num_vars: usize) -> Self {
        let terminal = |r| NodeData {
            level: TERMINAL_LEVEL,
            low: r,
            high: r,
        };
        BddManager {
            num_vars,
            nodes: vec![terminal(BddRef::FALSE), terminal(BddRef::TRUE)],
            unique: HashMap::new(),
            cache: HashMap::new(),
            not_cache: HashMap::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Internal nodes allocated so far, reachable or not.
    pub fn allocated(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn constant(&self, value: bool) -> BddRef {
        if value {
            BddRef::TRUE
        } else {
            BddRef::FALSE
        }
    }

    fn mk(&mut self, level: usize, low: BddRef, high: BddRef) -> BddRef {
        if low == high {
            return low;
        }
        let data = NodeData { level, low, high };
        if let Some(&r) = self.unique.get(&data) {
            return r;
        }
        let r = BddRef(self.nodes.len() as u32);
        self.nodes.push(data);
        self.unique.insert(data, r);
        r
    }

    pub fn node(&self, r: BddRef) -> Option<NodeView> {
        if r.is_terminal() {
            return None;
        }
        let d = self.nodes[r.index()];
        Some(NodeView {
            level: d.level,
            low: d.low,
            high: d.high,
        })
    }

    fn level(&self, r: BddRef) -> usize {
        self.nodes[r.index()].level
    }

    /// The diagram testing variable `ordinal`: high edge to 1, low edge to 0.
    pub fn mk_var(&mut self, ordinal: usize) -> Result<BddRef> {
        if ordinal >= self.num_vars {
            return Err(Error::OrdinalOutOfRange {
                ordinal,
                count: self.num_vars,
            });
        }
        Ok(self.mk(ordinal, BddRef::FALSE, BddRef::TRUE))
    }

    pub fn apply_and(&mut self, a: BddRef, b: BddRef) -> BddRef {
        self.apply(Op::And, a, b)
    }

    pub fn apply_or(&mut self, a: BddRef, b: BddRef) -> BddRef {
        self.apply(Op::Or, a, b)
    }

    fn apply(&mut self, op: Op, a: BddRef, b: BddRef) -> BddRef {
        match (op, a, b) {
            (Op::And, BddRef::FALSE, _) | (Op::And, _, BddRef::FALSE) => return BddRef::FALSE,
            (Op::And, BddRef::TRUE, x) | (Op::And, x, BddRef::TRUE) => return x,
            (Op::Or, BddRef::TRUE, _) | (Op::Or, _, BddRef::TRUE) => return BddRef::TRUE,
            (Op::Or, BddRef::FALSE, x) | (Op::Or, x, BddRef::FALSE) => return x,
            _ => {}
        }
        if a == b {
            return a;
        }
        // Both operators are commutative.
        let key = (op, a.min(b), a.max(b));
        if let Some(&r) = self.cache.get(&key) {
            return r;
        }
        let (la, lb) = (self.level(a), self.level(b));
        let level = la.min(lb);
        let (a0, a1) = self.cofactors(a, level);
        let (b0, b1) = self.cofactors(b, level);
        let low = self.apply(op, a0, b0);
        let high = self.apply(op, a1, b1);
        let r = self.mk(level, low, high);
        self.cache.insert(key, r);
        r
    }

    fn cofactors(&self, r: BddRef, level: usize) -> (BddRef, BddRef) {
        let d = self.nodes[r.index()];
        if d.level == level {
            (d.low, d.high)
        } else {
            (r, r)
        }
    }

    /// Complement, obtained by swapping the terminals.
    pub fn not(&mut self, r: BddRef) -> BddRef {
        match r {
            BddRef::FALSE => return BddRef::TRUE,
            BddRef::TRUE => return BddRef::FALSE,
            _ => {}
        }
        if let Some(&n) = self.not_cache.get(&r) {
            return n;
        }
        let d = self.nodes[r.index()];
        let low = self.not(d.low);
        let high = self.not(d.high);
        let n = self.mk(d.level, low, high);
        self.not_cache.insert(r, n);
        n
    }

    /// Canonical diagram of a monotone formula.
    pub fn build(&mut self, f: &MonotoneFormula) -> Result<BddRef> {
        Ok(match f {
            MonotoneFormula::True => BddRef::TRUE,
            MonotoneFormula::False => BddRef::FALSE,
            MonotoneFormula::Var(i) => self.mk_var(*i)?,
            MonotoneFormula::And(fs) => {
                let mut acc = BddRef::TRUE;
                for sub in fs {
                    let s = self.build(sub)?;
                    acc = self.apply_and(acc, s);
                }
                acc
            }
            MonotoneFormula::Or(fs) => {
                let mut acc = BddRef::FALSE;
                for sub in fs {
                    let s = self.build(sub)?;
                    acc = self.apply_or(acc, s);
                }
                acc
            }
        })
    }

    pub fn equivalent(&self, a: BddRef, b: BddRef) -> bool {
        a == b
    }

    pub fn eval(&self, r: BddRef, v: &Valuation) -> bool {
        let mut cur = r;
        while !cur.is_terminal() {
            let d = self.nodes[cur.index()];
            cur = if v.contains(&d.level) { d.high } else { d.low };
        }
        cur == BddRef::TRUE
    }

    /// Internal nodes reachable from `r`.
    pub fn node_count(&self, r: BddRef) -> usize {
        self.reachable(r).len()
    }

    /// Reachable internal nodes in depth-first preorder, high branch first.
    fn reachable(&self, r: BddRef) -> Vec<BddRef> {
        let mut seen = std::collections::HashSet::new();
        let mut order = Vec::new();
        let mut stack = vec![r];
        while let Some(x) = stack.pop() {
            if x.is_terminal() || !seen.insert(x) {
                continue;
            }
            order.push(x);
            let d = self.nodes[x.index()];
            stack.push(d.low);
            stack.push(d.high);
        }
        order
    }

    /// Bottom-up weighted evaluation: `P(n) = p * P(high) + (1 - p) * P(low)`.
    pub fn traverse(&self, r: BddRef, probs: &[f64]) -> Result<Traversal> {
        if let Some(bad) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidArgument(format!(
                "probability {bad} outside [0, 1]"
            )));
        }
        let mut values = HashMap::new();
        let probability = self.prob_rec(r, probs, &mut values)?;
        Ok(Traversal {
            probability,
            values,
        })
    }

    pub fn probability(&self, r: BddRef, probs: &[f64]) -> Result<f64> {
        self.traverse(r, probs).map(|t| t.probability)
    }

    fn prob_rec(&self, r: BddRef, probs: &[f64], memo: &mut HashMap<BddRef, f64>) -> Result<f64> {
        match r {
            BddRef::FALSE => return Ok(0.0),
            BddRef::TRUE => return Ok(1.0),
            _ => {}
        }
        if let Some(&v) = memo.get(&r) {
            return Ok(v);
        }
        let d = self.nodes[r.index()];
        let p = *probs
            .get(d.level)
            .ok_or(Error::MissingProbability(d.level))?;
        let high = self.prob_rec(d.high, probs, memo)?;
        let low = self.prob_rec(d.low, probs, memo)?;
        let v = p * high + (1.0 - p) * low;
        memo.insert(r, v);
        Ok(v)
    }

    /// Every root-to-1 path as its list of `(ordinal, branch)` decisions.
    /// The paths are pairwise incompatible and cover the function.
    pub fn one_paths(&self, r: BddRef) -> Vec<Vec<(usize, bool)>> {
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.paths_rec(r, &mut prefix, &mut out);
        out
    }

    fn paths_rec(
        &self,
        r: BddRef,
        prefix: &mut Vec<(usize, bool)>,
        out: &mut Vec<Vec<(usize, bool)>>,
    ) {
        match r {
            BddRef::FALSE => {}
            BddRef::TRUE => out.push(prefix.clone()),
            _ => {
                let d = self.nodes[r.index()];
                prefix.push((d.level, true));
                self.paths_rec(d.high, prefix, out);
                prefix.pop();
                prefix.push((d.level, false));
                self.paths_rec(d.low, prefix, out);
                prefix.pop();
            }
        }
    }

    /// Graphviz rendering; 0-edges are dashed.
    pub fn to_dot(&self, r: BddRef) -> String {
        let nodes = self.reachable(r);
        let names: HashMap<BddRef, String> = nodes
            .iter()
            .enumerate()
            .map(|(k, &n)| (n, format!("n{}", k + 1)))
            .collect();
        let name = |x: BddRef| match x {
            BddRef::FALSE => "zero".to_string(),
            BddRef::TRUE => "one".to_string(),
            _ => names[&x].clone(),
        };
        let mut out = String::from("digraph bdd {\n");
        out.push_str("  zero [shape=box, label=\"0\"];\n");
        out.push_str("  one [shape=box, label=\"1\"];\n");
        if r.is_terminal() {
            let _ = writeln!(out, "  root -> {};", name(r));
            out.push_str("  root [shape=point];\n");
        }
        for &n in &nodes {
            let d = self.nodes[n.index()];
            let _ = writeln!(out, "  {} [label=\"X{}\"];", name(n), d.level + 1);
            let _ = writeln!(out, "  {} -> {};", name(n), name(d.high));
            let _ = writeln!(out, "  {} -> {} [style=dashed];", name(n), name(d.low));
        }
        out.push_str("}\n");
        out
    }
}
