//! Tableau decision procedure for ALC with general TBoxes.
//!
//! Every concept is converted to NNF and interned once per knowledge base in
//! a [`Reasoner`]. A reasoning run then builds a completion graph over the
//! axioms switched on in an [`FixedBitSet`] mask, so the hitting set tree can
//! ask many questions about sub-KBs without recompiling anything.
//!
//! Rules fire in the order clash > and > forall > GCI > or > exists.
//! Disjunctions are split left first; a disjunction one of whose disjuncts
//! already clashes with the node label is resolved deterministically, which
//! is exactly the outcome of trying that disjunct and backtracking. Every
//! fact records the branching points it depends on, and the right disjunct
//! is skipped when the clash closing the left one does not depend on the
//! split; otherwise the right branch also receives the complement of the
//! left disjunct. A clash is `bottom` or any concept together with its
//! complement. A generated node is blocked when its label is a subset of the
//! label of an older unblocked generated node, ancestors included.
//!
//! In tracing mode every label entry and edge carries the set of axiom
//! indices it was derived from, and an unsatisfiable run reports the union of
//! the clash traces of all explored branches.

use std::cell::Cell;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::time::Instant;

use fixedbitset::FixedBitSet;
use indexmap::{IndexMap, IndexSet};

use crate::error::{Error, Limit, Result};
use crate::kb::{refutation_assertions, Axiom, Concept, KnowledgeBase, Query, RefutationSubject};

pub const DEFAULT_NODE_BUDGET: usize = 100_000;

/// Resource guards for a single reasoning call.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    /// Completion-graph nodes that may be created over a whole run, all
    /// branches included.
    pub max_nodes: usize,
    pub deadline: Option<Instant>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_nodes: DEFAULT_NODE_BUDGET,
            deadline: None,
        }
    }
}

impl Limits {
    pub fn check_deadline(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Error::exhausted(Limit::Timeout)),
            _ => Ok(()),
        }
    }
}

type Cid = u32;
type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    Top,
    Bottom,
    Atom(u32),
    NotAtom(u32),
    And(Cid, Cid),
    Or(Cid, Cid),
    Exists(u32, Cid),
    Forall(u32, Cid),
}

/// Hash-consed NNF concepts.
#[derive(Clone, Debug, Default)]
struct ConceptStore {
    nodes: Vec<Node>,
    index: HashMap<Node, Cid>,
    /// `nnf(not C)` for every interned `C`, once [`Self::close`] has run.
    complement: Vec<Option<Cid>>,
    names: IndexSet<String>,
    roles: IndexSet<String>,
}

impl ConceptStore {
    fn mk(&mut self, node: Node) -> Cid {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len() as Cid;
        self.nodes.push(node);
        self.complement.push(None);
        self.index.insert(node, id);
        id
    }

    fn literal(&mut self, name: &str, positive: bool) -> Cid {
        let (n, _) = self.names.insert_full(name.to_string());
        let n = n as u32;
        let pos = self.mk(Node::Atom(n));
        let neg = self.mk(Node::NotAtom(n));
        self.complement[pos as usize] = Some(neg);
        self.complement[neg as usize] = Some(pos);
        if positive {
            pos
        } else {
            neg
        }
    }

    fn role(&mut self, name: &str) -> u32 {
        self.roles.insert_full(name.to_string()).0 as u32
    }

    /// Interns a concept that is already in NNF.
    fn intern(&mut self, c: &Concept) -> Cid {
        match c {
            Concept::Top => self.mk(Node::Top),
            Concept::Bottom => self.mk(Node::Bottom),
            Concept::Atomic(name) => self.literal(name, true),
            Concept::Not(inner) => match &**inner {
                Concept::Atomic(name) => self.literal(name, false),
                other => {
                    let nnf = Concept::not(other.clone()).nnf();
                    self.intern(&nnf)
                }
            },
            Concept::And(l, r) => {
                let (l, r) = (self.intern(l), self.intern(r));
                self.mk(Node::And(l, r))
            }
            Concept::Or(l, r) => {
                let (l, r) = (self.intern(l), self.intern(r));
                self.mk(Node::Or(l, r))
            }
            Concept::Exists(role, c) => {
                let role = self.role(role);
                let c = self.intern(c);
                self.mk(Node::Exists(role, c))
            }
            Concept::Forall(role, c) => {
                let role = self.role(role);
                let c = self.intern(c);
                self.mk(Node::Forall(role, c))
            }
        }
    }

    fn node(&self, c: Cid) -> Node {
        self.nodes[c as usize]
    }

    fn concept(&self, c: Cid) -> Concept {
        match self.node(c) {
            Node::Top => Concept::Top,
            Node::Bottom => Concept::Bottom,
            Node::Atom(n) => Concept::atomic(&self.names[n as usize]),
            Node::NotAtom(n) => Concept::not(Concept::atomic(&self.names[n as usize])),
            Node::And(l, r) => Concept::and(self.concept(l), self.concept(r)),
            Node::Or(l, r) => Concept::or(self.concept(l), self.concept(r)),
            Node::Exists(r, c) => Concept::exists(&self.roles[r as usize], self.concept(c)),
            Node::Forall(r, c) => Concept::forall(&self.roles[r as usize], self.concept(c)),
        }
    }

    /// Interns the complement of every concept, including complements of
    /// concepts interned along the way.
    fn close(&mut self) {
        let mut c = 0;
        while c < self.nodes.len() {
            if self.complement[c].is_none() {
                let neg = Concept::not(self.concept(c as Cid)).nnf();
                let id = self.intern(&neg);
                self.complement[c] = Some(id);
                self.complement[id as usize] = Some(c as Cid);
            }
            c += 1;
        }
    }
}

#[derive(Clone, Debug)]
enum CompiledAxiom {
    /// `nnf(not C or D)` for `C <= D`.
    Gci(Cid),
    Member(u32, Cid),
    Edge(u32, u32, u32),
}

/// Refutation assertions for a query, compiled against one [`Reasoner`].
#[derive(Clone, Debug)]
pub struct Goal {
    facts: Vec<(Subject, Cid)>,
}

#[derive(Clone, Copy, Debug)]
enum Subject {
    Named(u32),
    Fresh,
}

/// Outcome of a completion run.
#[derive(Clone, Debug)]
enum Outcome {
    Open,
    /// Clash found on every branch; carries the accumulated trace.
    Closed(Dep),
}

/// A knowledge base compiled for repeated tableau runs over its subsets.
#[derive(Clone, Debug)]
pub struct Reasoner {
    store: ConceptStore,
    axioms: Vec<CompiledAxiom>,
    individuals: IndexSet<String>,
    limits: Limits,
    calls: Cell<usize>,
}

impl Reasoner {
    pub fn new(kb: &KnowledgeBase, limits: Limits) -> Self {
        let mut store = ConceptStore::default();
        let mut individuals = IndexSet::new();
        let mut ind = |name: &str| individuals.insert_full(name.to_string()).0 as u32;
        let axioms = kb
            .axioms()
            .iter()
            .map(|ax| match &ax.axiom {
                Axiom::SubClassOf { sub, sup } => {
                    let gci = Concept::or(Concept::not(sub.clone()), sup.clone()).nnf();
                    CompiledAxiom::Gci(store.intern(&gci))
                }
                Axiom::ConceptAssertion {
                    individual,
                    concept,
                } => {
                    let i = ind(individual);
                    CompiledAxiom::Member(i, store.intern(&concept.nnf()))
                }
                Axiom::RoleAssertion {
                    subject,
                    object,
                    role,
                } => {
                    let (s, o) = (ind(subject), ind(object));
                    CompiledAxiom::Edge(s, o, store.role(role))
                }
            })
            .collect();
        store.close();
        Reasoner {
            store,
            axioms,
            individuals,
            limits,
            calls: Cell::new(0),
        }
    }

    pub fn axiom_count(&self) -> usize {
        self.axioms.len()
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn set_limits(&mut self, limits: Limits) {
        self.limits = limits;
    }

    /// Number of completed tableau runs since construction.
    pub fn calls(&self) -> usize {
        self.calls.get()
    }

    /// A mask with every axiom switched on.
    pub fn full_mask(&self) -> FixedBitSet {
        let mut m = FixedBitSet::with_capacity(self.axioms.len());
        m.insert_range(..);
        m
    }

    pub fn mask_of(&self, indices: impl IntoIterator<Item = usize>) -> FixedBitSet {
        let mut m = FixedBitSet::with_capacity(self.axioms.len());
        for i in indices {
            m.insert(i);
        }
        m
    }

    /// Compile the refutation assertions of `q`.
    pub fn goal(&mut self, q: &Query) -> Goal {
        let facts = refutation_assertions(q)
            .into_iter()
            .map(|(subject, concept)| {
                let subject = match subject {
                    RefutationSubject::Named(name) => {
                        Subject::Named(self.individuals.insert_full(name).0 as u32)
                    }
                    RefutationSubject::Fresh => Subject::Fresh,
                };
                (subject, self.store.intern(&concept))
            })
            .collect();
        self.store.close();
        Goal { facts }
    }

    pub fn is_consistent(&self, mask: &FixedBitSet) -> Result<bool> {
        Ok(matches!(self.run(mask, None, false)?, Outcome::Open))
    }

    pub fn entails(&self, mask: &FixedBitSet, goal: &Goal) -> Result<bool> {
        Ok(matches!(
            self.run(mask, Some(goal), false)?,
            Outcome::Closed(_)
        ))
    }

    /// Axiom indices (within `mask`) responsible for the entailment, or `None`
    /// if the query is not entailed.
    pub fn trace(&self, mask: &FixedBitSet, goal: &Goal) -> Result<Option<FixedBitSet>> {
        match self.run(mask, Some(goal), true)? {
            Outcome::Open => Ok(None),
            Outcome::Closed(d) => Ok(Some(d.trace)),
        }
    }

    fn run(&self, mask: &FixedBitSet, goal: Option<&Goal>, tracing: bool) -> Result<Outcome> {
        self.calls.set(self.calls.get() + 1);
        self.limits.check_deadline()?;
        let ctx = RunCtx {
            store: &self.store,
            gcis: mask
                .ones()
                .filter_map(|i| match self.axioms.get(i) {
                    Some(CompiledAxiom::Gci(c)) => Some((i, *c)),
                    _ => None,
                })
                .collect(),
            width: self.axioms.len(),
            tracing,
            limits: self.limits,
            created: Cell::new(0),
            steps: Cell::new(0),
        };
        let mut g = Graph::default();
        let mut named: HashMap<u32, NodeId> = HashMap::new();

        // Named individuals in order of first occurrence among active axioms.
        let mut node_for = |g: &mut Graph, ind: u32| -> Result<NodeId> {
            if let Some(&n) = named.get(&ind) {
                return Ok(n);
            }
            let n = g.add_node(&ctx, None)?;
            named.insert(ind, n);
            Ok(n)
        };

        let mut seeds: Vec<(NodeId, Cid, Dep)> = Vec::new();
        let mut edges: Vec<(NodeId, u32, NodeId, Dep)> = Vec::new();
        for i in mask.ones() {
            match self.axioms.get(i) {
                Some(CompiledAxiom::Member(ind, c)) => {
                    let n = node_for(&mut g, *ind)?;
                    seeds.push((n, *c, ctx.singleton(i)));
                }
                Some(CompiledAxiom::Edge(s, o, r)) => {
                    let (s, o) = (node_for(&mut g, *s)?, node_for(&mut g, *o)?);
                    edges.push((s, *r, o, ctx.singleton(i)));
                }
                _ => {}
            }
        }
        if let Some(goal) = goal {
            for &(subject, c) in &goal.facts {
                let n = match subject {
                    Subject::Named(ind) => node_for(&mut g, ind)?,
                    Subject::Fresh => g.add_node(&ctx, None)?,
                };
                seeds.push((n, c, ctx.empty()));
            }
        }
        // The domain is never empty.
        if g.nodes.is_empty() {
            g.add_node(&ctx, None)?;
        }

        for (s, r, o, t) in edges {
            g.add_edge(s, r, o, t);
        }
        for (n, c, t) in seeds {
            if let Err(clash) = g.add_fact(&ctx, n, c, t) {
                return Ok(Outcome::Closed(clash));
            }
        }
        expand(&ctx, &mut g, 0)
    }
}

struct RunCtx<'a> {
    store: &'a ConceptStore,
    gcis: Vec<(usize, Cid)>,
    width: usize,
    tracing: bool,
    limits: Limits,
    created: Cell<usize>,
    steps: Cell<usize>,
}

impl RunCtx<'_> {
    fn empty(&self) -> Dep {
        Dep {
            trace: if self.tracing {
                FixedBitSet::with_capacity(self.width)
            } else {
                FixedBitSet::new()
            },
            branches: FixedBitSet::new(),
        }
    }

    fn singleton(&self, i: usize) -> Dep {
        let mut d = self.empty();
        if self.tracing {
            d.trace.insert(i);
        }
        d
    }

    fn union(&self, a: &Dep, b: &Dep) -> Dep {
        let mut d = a.clone();
        if self.tracing {
            d.trace.union_with(&b.trace);
        }
        d.branches.union_with(&b.branches);
        d
    }

    fn tick(&self) -> Result<()> {
        let s = self.steps.get() + 1;
        self.steps.set(s);
        if s.is_multiple_of(256) {
            self.limits.check_deadline()?;
        }
        Ok(())
    }
}

/// Why a fact holds: the axioms it was derived from (tracing mode only) and
/// the branching points it depends on.
#[derive(Clone, Debug, Default)]
struct Dep {
    trace: FixedBitSet,
    branches: FixedBitSet,
}

impl Dep {
    fn with_branch(mut self, b: usize) -> Dep {
        self.branches.grow(b + 1);
        self.branches.insert(b);
        self
    }

    fn depends_on(&self, b: usize) -> bool {
        self.branches.contains(b)
    }

    fn without_branch(mut self, b: usize) -> Dep {
        if b < self.branches.len() {
            self.branches.set(b, false);
        }
        self
    }
}

#[derive(Clone, Debug, Default)]
struct GraphNode {
    label: IndexMap<Cid, Dep>,
    /// `None` for root nodes (named individuals and the fresh query individual).
    parent: Option<NodeId>,
    edges: Vec<(u32, NodeId, Dep)>,
}

/// The completion graph together with its rule agendas.
#[derive(Clone, Debug, Default)]
struct Graph {
    nodes: Vec<GraphNode>,
    conj: VecDeque<(NodeId, Cid)>,
    univ: VecDeque<(NodeId, Cid)>,
    gci: VecDeque<NodeId>,
    disj: Vec<(NodeId, Cid)>,
    exist: Vec<(NodeId, Cid)>,
    /// Label entries and edges in the order they were appended.
    trail: Vec<Appended>,
}

#[derive(Clone, Copy, Debug)]
enum Appended {
    Label(NodeId),
    Edge(NodeId),
}

/// State to return to when a branch closes. Labels, edges and nodes only
/// grow along a branch, so they are restored by popping the trail.
struct Snapshot {
    nodes: usize,
    trail: usize,
    conj: VecDeque<(NodeId, Cid)>,
    univ: VecDeque<(NodeId, Cid)>,
    gci: VecDeque<NodeId>,
    disj: Vec<(NodeId, Cid)>,
    exist: Vec<(NodeId, Cid)>,
}

type Clash = Dep;

impl Graph {
    fn snapshot(&self) -> Snapshot {
        Snapshot {
            nodes: self.nodes.len(),
            trail: self.trail.len(),
            conj: self.conj.clone(),
            univ: self.univ.clone(),
            gci: self.gci.clone(),
            disj: self.disj.clone(),
            exist: self.exist.clone(),
        }
    }

    fn restore(&mut self, s: Snapshot) {
        for entry in self.trail.drain(s.trail..).rev() {
            match entry {
                Appended::Label(n) => {
                    self.nodes[n].label.pop();
                }
                Appended::Edge(n) => {
                    self.nodes[n].edges.pop();
                }
            }
        }
        self.nodes.truncate(s.nodes);
        self.conj = s.conj;
        self.univ = s.univ;
        self.gci = s.gci;
        self.disj = s.disj;
        self.exist = s.exist;
    }

    fn add_node(&mut self, ctx: &RunCtx<'_>, parent: Option<NodeId>) -> Result<NodeId> {
        let created = ctx.created.get() + 1;
        if created > ctx.limits.max_nodes {
            return Err(Error::exhausted(Limit::TableauNodes(ctx.limits.max_nodes)));
        }
        ctx.created.set(created);
        let id = self.nodes.len();
        self.nodes.push(GraphNode {
            parent,
            ..Default::default()
        });
        self.gci.push_back(id);
        Ok(id)
    }

    fn add_edge(&mut self, from: NodeId, role: u32, to: NodeId, dep: Dep) {
        self.nodes[from].edges.push((role, to, dep));
        self.trail.push(Appended::Edge(from));
        // Re-run universal restrictions of `from` over the new edge.
        let pending: Vec<Cid> = self.nodes[from].label.keys().copied().collect();
        for c in pending {
            self.univ.push_back((from, c));
        }
    }

    fn add_fact(&mut self, ctx: &RunCtx<'_>, n: NodeId, c: Cid, dep: Dep) -> Result<(), Clash> {
        if self.nodes[n].label.contains_key(&c) {
            return Ok(());
        }
        let node = ctx.store.node(c);
        if node == Node::Bottom {
            return Err(dep);
        }
        if let Some(comp) = ctx.store.complement[c as usize] {
            if let Some(other) = self.nodes[n].label.get(&comp) {
                return Err(ctx.union(&dep, other));
            }
        }
        self.nodes[n].label.insert(c, dep);
        self.trail.push(Appended::Label(n));
        match node {
            Node::And(..) => self.conj.push_back((n, c)),
            Node::Forall(..) => self.univ.push_back((n, c)),
            Node::Or(..) => self.disj.push((n, c)),
            Node::Exists(..) => self.exist.push((n, c)),
            _ => {}
        }
        Ok(())
    }

    fn dep_of(&self, n: NodeId, c: Cid) -> Dep {
        self.nodes[n].label[&c].clone()
    }

    /// Dependencies of a fact contradicting `c` at `n`, if the label holds one.
    fn refuted(&self, ctx: &RunCtx<'_>, n: NodeId, c: Cid) -> Option<Dep> {
        match ctx.store.node(c) {
            Node::Bottom => Some(ctx.empty()),
            _ => ctx.store.complement[c as usize]
                .and_then(|comp| self.nodes[n].label.get(&comp))
                .cloned(),
        }
    }

    /// Blocking status of every node. A generated node is directly blocked
    /// when its label is contained in the label of an older generated node
    /// that is not blocked itself; blocking is inherited by descendants.
    fn blocked_flags(&self) -> Vec<bool> {
        let mut blocked = vec![false; self.nodes.len()];
        for y in 0..self.nodes.len() {
            let Some(parent) = self.nodes[y].parent else {
                continue;
            };
            if blocked[parent] {
                blocked[y] = true;
                continue;
            }
            let label = &self.nodes[y].label;
            blocked[y] = (0..y).any(|x| {
                let other = &self.nodes[x];
                !blocked[x]
                    && other.parent.is_some()
                    && other.label.len() >= label.len()
                    && label.keys().all(|c| other.label.contains_key(c))
            });
        }
        blocked
    }
}

enum Step {
    Progress,
    Branch(NodeId, Cid),
    Done,
}

/// Why a rule application stopped the current branch.
enum Halt {
    Clash(Clash),
    Exhausted(Error),
}

impl From<Clash> for Halt {
    fn from(c: Clash) -> Self {
        Halt::Clash(c)
    }
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        Halt::Exhausted(e)
    }
}

/// Runs the rules to completion. `depth` is the identifier given to the next
/// branching point; identifiers are unique along every path of the search.
fn expand(ctx: &RunCtx<'_>, g: &mut Graph, depth: usize) -> Result<Outcome> {
    loop {
        ctx.tick()?;
        match step(ctx, g) {
            Err(Halt::Clash(clash)) => return Ok(Outcome::Closed(clash)),
            Err(Halt::Exhausted(e)) => return Err(e),
            Ok(Step::Progress) => {}
            Ok(Step::Done) => return Ok(Outcome::Open),
            Ok(Step::Branch(n, c)) => {
                let Node::Or(left, right) = ctx.store.node(c) else {
                    unreachable!("branching on a non-disjunction")
                };
                let d = g.dep_of(n, c);
                let saved = g.snapshot();
                let left_clash = match g.add_fact(ctx, n, left, d.clone().with_branch(depth)) {
                    Err(clash) => clash,
                    Ok(()) => match expand(ctx, g, depth + 1)? {
                        Outcome::Open => return Ok(Outcome::Open),
                        Outcome::Closed(clash) => clash,
                    },
                };
                g.restore(saved);
                // A clash independent of the left disjunct recurs on the right.
                if !left_clash.depends_on(depth) {
                    return Ok(Outcome::Closed(left_clash));
                }
                // The right branch also records that the left disjunct failed.
                let left_clash = left_clash.without_branch(depth);
                let because = ctx.union(&d, &left_clash);
                let not_left = ctx.store.complement[left as usize].expect("store is closed");
                let added = g
                    .add_fact(ctx, n, right, because.clone())
                    .and_then(|()| g.add_fact(ctx, n, not_left, because));
                let right_clash = match added {
                    Err(clash) => clash,
                    Ok(()) => match expand(ctx, g, depth + 1)? {
                        Outcome::Open => return Ok(Outcome::Open),
                        Outcome::Closed(clash) => clash,
                    },
                };
                return Ok(Outcome::Closed(ctx.union(&left_clash, &right_clash)));
            }
        }
    }
}

/// Applies one deterministic rule, or reports the next branching point.
fn step(ctx: &RunCtx<'_>, g: &mut Graph) -> Result<Step, Halt> {
    if let Some((n, c)) = g.conj.pop_front() {
        let Node::And(l, r) = ctx.store.node(c) else {
            unreachable!()
        };
        let d = g.dep_of(n, c);
        g.add_fact(ctx, n, l, d.clone())?;
        g.add_fact(ctx, n, r, d)?;
        return Ok(Step::Progress);
    }

    if let Some((n, c)) = g.univ.pop_front() {
        if let Node::Forall(role, body) = ctx.store.node(c) {
            let d = g.dep_of(n, c);
            let targets: Vec<(NodeId, Dep)> = g.nodes[n]
                .edges
                .iter()
                .filter(|(r, _, _)| *r == role)
                .map(|(_, to, ed)| (*to, ctx.union(&d, ed)))
                .collect();
            for (to, dep) in targets {
                g.add_fact(ctx, to, body, dep)?;
            }
        }
        return Ok(Step::Progress);
    }

    if let Some(n) = g.gci.pop_front() {
        for &(i, c) in &ctx.gcis {
            g.add_fact(ctx, n, c, ctx.singleton(i))?;
        }
        return Ok(Step::Progress);
    }

    // Drop satisfied disjunctions, propagate unit ones, otherwise branch on
    // the oldest open one.
    let mut i = 0;
    let mut branch = None;
    while i < g.disj.len() {
        let (n, c) = g.disj[i];
        let Node::Or(l, r) = ctx.store.node(c) else {
            unreachable!()
        };
        let label = &g.nodes[n].label;
        let is_top = |x: Cid| ctx.store.node(x) == Node::Top;
        if label.contains_key(&l) || label.contains_key(&r) || is_top(l) || is_top(r) {
            g.disj.remove(i);
            continue;
        }
        let (left_out, right_out) = (g.refuted(ctx, n, l), g.refuted(ctx, n, r));
        if left_out.is_some() || right_out.is_some() {
            g.disj.remove(i);
            let d = g.dep_of(n, c);
            match (left_out, right_out) {
                (Some(ld), Some(rd)) => {
                    return Err(Halt::Clash(ctx.union(&ctx.union(&d, &ld), &rd)));
                }
                (Some(ld), None) => g.add_fact(ctx, n, r, ctx.union(&d, &ld))?,
                (None, Some(rd)) => g.add_fact(ctx, n, l, ctx.union(&d, &rd))?,
                (None, None) => unreachable!(),
            }
            return Ok(Step::Progress);
        }
        if branch.is_none() {
            branch = Some(i);
        }
        i += 1;
    }
    if let Some(i) = branch {
        let (n, c) = g.disj.remove(i);
        return Ok(Step::Branch(n, c));
    }

    let blocked = g.blocked_flags();
    let mut i = 0;
    while i < g.exist.len() {
        let (n, c) = g.exist[i];
        let Node::Exists(role, body) = ctx.store.node(c) else {
            unreachable!()
        };
        let satisfied = g.nodes[n]
            .edges
            .iter()
            .any(|(r, to, _)| *r == role && g.nodes[*to].label.contains_key(&body));
        if satisfied {
            g.exist.remove(i);
            continue;
        }
        if blocked[n] {
            i += 1;
            continue;
        }
        g.exist.remove(i);
        let d = g.dep_of(n, c);
        let child = g.add_node(ctx, Some(n))?;
        g.add_edge(n, role, child, d.clone());
        g.add_fact(ctx, child, body, d)?;
        return Ok(Step::Progress);
    }
    Ok(Step::Done)
}

fn mask_for(reasoner: &Reasoner, axioms: &BTreeSet<usize>) -> Result<FixedBitSet> {
    if let Some(&bad) = axioms.iter().find(|&&i| i >= reasoner.axiom_count()) {
        return Err(Error::InvalidArgument(format!(
            "axiom index {bad} out of range"
        )));
    }
    Ok(reasoner.mask_of(axioms.iter().copied()))
}

/// Consistency of the axioms of `kb` listed in `axioms`.
pub fn is_consistent(kb: &KnowledgeBase, axioms: &BTreeSet<usize>, limits: Limits) -> Result<bool> {
    let reasoner = Reasoner::new(kb, limits);
    let mask = mask_for(&reasoner, axioms)?;
    reasoner.is_consistent(&mask)
}

/// Whether the listed axioms of `kb` entail `q`.
pub fn entails(
    kb: &KnowledgeBase,
    axioms: &BTreeSet<usize>,
    q: &Query,
    limits: Limits,
) -> Result<bool> {
    let mut reasoner = Reasoner::new(kb, limits);
    let goal = reasoner.goal(q);
    let mask = mask_for(&reasoner, axioms)?;
    reasoner.entails(&mask, &goal)
}

/// A subset of `axioms` that entails `q`, read off the clash traces.
/// Not necessarily minimal.
pub fn trace_entailment(
    kb: &KnowledgeBase,
    axioms: &BTreeSet<usize>,
    q: &Query,
    limits: Limits,
) -> Result<BTreeSet<usize>> {
    let mut reasoner = Reasoner::new(kb, limits);
    let goal = reasoner.goal(q);
    let mask = mask_for(&reasoner, axioms)?;
    match reasoner.trace(&mask, &goal)? {
        Some(t) => Ok(t.ones().collect()),
        None => Err(Error::Precondition(format!("`{q}` is not entailed"))),
    }
}
