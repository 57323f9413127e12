//! Syntax graphs, matching relations, the bidirectional flow function and
//! the worklist typing algorithm.

mod memo;
mod run;

use std::fmt;

use crate::antichain::{Antichain, Poset};
use crate::diag::Span;
use crate::universe::TypeId;

pub use memo::{flow_symbolic, FlowMemo, FlowStats};
pub use run::{classify_typing, run_typing, run_typing_from, Classification, RunOptions, RunResult, Schedule, TraceEvent};

/// Index of a matching relation in a [`MatchTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelId(pub u32);

/// A type matching relation M_γ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchRelation {
    pub name: String,
    pairs: Vec<(TypeId, TypeId)>,
}

impl MatchRelation {
    pub fn new(name: impl Into<String>, pairs: impl IntoIterator<Item = (TypeId, TypeId)>) -> Self {
        let mut pairs: Vec<(TypeId, TypeId)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        pairs.dedup();
        MatchRelation {
            name: name.into(),
            pairs,
        }
    }

    pub fn pairs(&self) -> &[(TypeId, TypeId)] {
        &self.pairs
    }

    pub fn contains(&self, a: TypeId, b: TypeId) -> bool {
        self.pairs.binary_search(&(a, b)).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    /// All `b` with `(a, b) ∈ M`.
    pub fn image(&self, a: TypeId) -> impl Iterator<Item = TypeId> + '_ {
        let lo = self.pairs.partition_point(|p| p.0 < a);
        let hi = self.pairs.partition_point(|p| p.0 <= a);
        self.pairs[lo..hi].iter().map(|p| p.1)
    }

    pub fn inverse(&self, name: impl Into<String>) -> MatchRelation {
        MatchRelation::new(name, self.pairs.iter().map(|&(a, b)| (b, a)))
    }
}

/// The indexed family {M_γ}.
#[derive(Clone, Debug, Default)]
pub struct MatchTable {
    relations: Vec<MatchRelation>,
}

impl MatchTable {
    pub fn new() -> Self {
        MatchTable::default()
    }

    pub fn add(&mut self, rel: MatchRelation) -> LabelId {
        self.relations.push(rel);
        LabelId(self.relations.len() as u32 - 1)
    }

    pub fn get(&self, id: LabelId) -> &MatchRelation {
        &self.relations[id.0 as usize]
    }

    pub fn find(&self, name: &str) -> Option<LabelId> {
        self.relations
            .iter()
            .position(|r| r.name == name)
            .map(|i| LabelId(i as u32))
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }
}

/// Checks cross-closedness; returns the missing `(t, u)` pairs.
pub fn validate_cross_closed(m: &MatchRelation, poset: &Poset) -> Result<(), Vec<(TypeId, TypeId)>> {
    let mut missing = Vec::new();
    for &(t, u1) in m.pairs() {
        for &(t1, u) in m.pairs() {
            if poset.leq(t1, t) && poset.leq(u1, u) && !m.contains(t, u) {
                missing.push((t, u));
            }
        }
    }
    missing.sort_unstable();
    missing.dedup();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(missing)
    }
}

/// F_γ(A, B) straight from the definition: the maximal `a ∈ A⁺` with a
/// partner in `B⁺`, and symmetrically.
pub fn flow_naive(m: &MatchRelation, a: &Antichain, b: &Antichain, poset: &Poset) -> (Antichain, Antichain) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for &(x, y) in m.pairs() {
        if a.covers(poset, x) && b.covers(poset, y) {
            left.push(x);
            right.push(y);
        }
    }
    (
        Antichain::restrict_maximal(poset, left),
        Antichain::restrict_maximal(poset, right),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EdgeId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeInfo {
    pub span: Span,
    pub role: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub label: LabelId,
}

/// G = ⟨N, E, γ⟩.
#[derive(Clone, Debug, Default)]
pub struct SyntaxGraph {
    nodes: Vec<NodeInfo>,
    edges: Vec<Edge>,
    incident: Vec<Vec<EdgeId>>,
}

impl SyntaxGraph {
    pub fn new() -> Self {
        SyntaxGraph::default()
    }

    pub fn add_node(&mut self, span: Span, role: impl Into<String>) -> NodeId {
        self.nodes.push(NodeInfo {
            span,
            role: role.into(),
        });
        self.incident.push(Vec::new());
        NodeId(self.nodes.len() as u32 - 1)
    }

    pub fn add_edge(&mut self, from: NodeId, to: NodeId, label: LabelId) -> EdgeId {
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(Edge { from, to, label });
        self.incident[from.index()].push(id);
        if to != from {
            self.incident[to.index()].push(id);
        }
        id
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, n: NodeId) -> &NodeInfo {
        &self.nodes[n.index()]
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        self.edges[e.0 as usize]
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, Edge)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, &e)| (EdgeId(i as u32), e))
    }

    /// Edges with `n` at either end.
    pub fn incident(&self, n: NodeId) -> &[EdgeId] {
        &self.incident[n.index()]
    }

    pub fn degree(&self, n: NodeId) -> usize {
        self.incident[n.index()].len()
    }
}

/// Δ: one antichain per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Typing {
    pub assignment: Vec<Antichain>,
}

impl Typing {
    pub fn uniform(n: usize, a: Antichain) -> Self {
        Typing {
            assignment: vec![a; n],
        }
    }

    pub fn get(&self, n: NodeId) -> &Antichain {
        &self.assignment[n.index()]
    }

    pub fn set(&mut self, n: NodeId, a: Antichain) {
        self.assignment[n.index()] = a;
    }

    /// Δ ⊑ Δ' pointwise.
    pub fn leq(&self, other: &Typing, poset: &Poset) -> bool {
        self.assignment
            .iter()
            .zip(&other.assignment)
            .all(|(a, b)| a.leq(b, poset))
    }
}
