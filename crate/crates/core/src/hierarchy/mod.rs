//! Inference of the static subsumption order ⪯ as the greatest type
//! simulation contained in a syntactic overapproximation.

mod counterexample;
mod init;

use std::collections::VecDeque;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;

use crate::antichain::Poset;
use crate::universe::{RelationLabel, TypeId, TypeRelation, TypeUniverse};

pub use counterexample::{check_subsumption, CounterexamplePath, Terminal};
pub use init::{
    initial_approximation, initial_approximation_layered, separate, syntactic_le, DEFAULT_DEPTH,
};

/// A candidate relation R⪯ over a universe; `(t, t')` reads "t is
/// stronger than t'", i.e. t ⪯ t'.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSubsumption {
    rows: Vec<FixedBitSet>,
}

impl CandidateSubsumption {
    pub fn identity(n: usize) -> Self {
        let mut rows = vec![FixedBitSet::with_capacity(n); n];
        for (t, row) in rows.iter_mut().enumerate() {
            row.insert(t);
        }
        CandidateSubsumption { rows }
    }

    pub fn full(n: usize) -> Self {
        let mut rows = vec![FixedBitSet::with_capacity(n); n];
        for row in rows.iter_mut() {
            row.insert_range(..);
        }
        CandidateSubsumption { rows }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (TypeId, TypeId)>) -> Self {
        let mut r = CandidateSubsumption::identity(n);
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    /// Number of types the relation ranges over.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, a: TypeId, b: TypeId) -> bool {
        self.rows[a.index()].contains(b.index())
    }

    pub fn insert(&mut self, a: TypeId, b: TypeId) {
        self.rows[a.index()].insert(b.index());
    }

    pub fn remove(&mut self, a: TypeId, b: TypeId) {
        self.rows[a.index()].set(b.index(), false);
    }

    /// All `t'` with `a ⪯ t'`.
    pub fn row(&self, a: TypeId) -> &FixedBitSet {
        &self.rows[a.index()]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (TypeId, TypeId)> + '_ {
        self.rows.iter().enumerate().flat_map(|(a, row)| {
            row.ones()
                .map(move |b| (TypeId(a as u32), TypeId(b as u32)))
        })
    }

    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn is_preorder(&self) -> bool {
        let n = self.rows.len();
        (0..n).all(|a| self.rows[a].contains(a))
            && (0..n).all(|a| {
                self.rows[a]
                    .ones()
                    .all(|b| self.rows[b].is_subset(&self.rows[a]))
            })
    }
}

/// One simulation obligation's witness: `u` with `(u, u') ∈ R` reached
/// either directly (`t R_σ u`) or through `t R v R†_σ u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Witness {
    u: TypeId,
    via: Option<TypeId>,
}

fn find_witness(
    r: &CandidateSubsumption,
    rel: &TypeRelation,
    t: TypeId,
    u2: TypeId,
) -> Option<Witness> {
    if let Some(u) = rel.image(t).find(|&u| r.contains(u, u2)) {
        return Some(Witness { u, via: None });
    }
    if rel.strengthenable_pairs().is_empty() {
        return None;
    }
    for v in r.row(t).ones().map(|i| TypeId(i as u32)) {
        if let Some(u) = rel.strengthenable_image(v).find(|&u| r.contains(u, u2)) {
            return Some(Witness { u, via: Some(v) });
        }
    }
    None
}

/// `t ≃^σ_R t'` for one relation.
pub fn simulates_under(r: &CandidateSubsumption, rel: &TypeRelation, t: TypeId, t2: TypeId) -> bool {
    rel.image(t2).all(|u2| find_witness(r, rel, t, u2).is_some())
}

/// `t ≃^σ_R t'` for the relation labelled `label` in `u`.
pub fn sigma_simulates(
    r: &CandidateSubsumption,
    u: &TypeUniverse,
    label: &RelationLabel,
    t: TypeId,
    t2: TypeId,
) -> bool {
    simulates_under(r, &u.lookup_relation(label), t, t2)
}

/// Largest R ⊆ `init` that is a σ-simulation for every relation in
/// `relations`, by worklist edge elimination.
///
/// Each retained pair remembers the pairs its witnesses used; removing a
/// pair re-checks exactly its dependents. Reflexive pairs are kept.
pub fn greatest_fixed_point_of(
    relations: &[&TypeRelation],
    init: &CandidateSubsumption,
) -> CandidateSubsumption {
    let n = init.len();
    let idx = |a: TypeId, b: TypeId| a.index() * n + b.index();
    let mut r = init.clone();
    let mut deps: Vec<Vec<u32>> = vec![Vec::new(); n * n];
    let mut in_queue = FixedBitSet::with_capacity(n * n);
    let mut queue: VecDeque<(TypeId, TypeId)> = VecDeque::new();
    for (a, b) in init.pairs() {
        if a != b {
            in_queue.insert(idx(a, b));
            queue.push_back((a, b));
        }
    }

    while let Some((t, t2)) = queue.pop_front() {
        let p = idx(t, t2);
        in_queue.set(p, false);
        if !r.contains(t, t2) {
            continue;
        }
        let mut ok = true;
        'rels: for rel in relations {
            for u2 in rel.image(t2) {
                match find_witness(&r, rel, t, u2) {
                    Some(w) => {
                        if w.u != u2 {
                            deps[idx(w.u, u2)].push(p as u32);
                        }
                        if let Some(v) = w.via {
                            if v != t {
                                deps[idx(t, v)].push(p as u32);
                            }
                        }
                    }
                    None => {
                        ok = false;
                        break 'rels;
                    }
                }
            }
        }
        if !ok {
            r.remove(t, t2);
            for d in std::mem::take(&mut deps[p]) {
                let d = d as usize;
                let (a, b) = (TypeId((d / n) as u32), TypeId((d % n) as u32));
                if r.contains(a, b) && !in_queue.contains(d) {
                    in_queue.insert(d);
                    queue.push_back((a, b));
                }
            }
        }
    }
    r
}

/// Greatest fixed point of F below `init` over the universe's simulation
/// relations, normalized to a partial order.
pub fn greatest_fixed_point(u: &TypeUniverse, init: &CandidateSubsumption) -> SubsumptionOrder {
    let rels: Vec<&TypeRelation> = u.simulation_relations().collect();
    let raw = greatest_fixed_point_of(&rels, init);
    SubsumptionOrder::new(raw, init.clone())
}

/// Settings for [`infer`].
#[derive(Clone, Debug)]
pub struct InferOptions {
    pub depth: u32,
    /// Pairs of types that must not subsume each other.
    pub distinct: Vec<(TypeId, TypeId)>,
}

impl Default for InferOptions {
    fn default() -> Self {
        InferOptions {
            depth: DEFAULT_DEPTH,
            distinct: Vec::new(),
        }
    }
}

/// Initial approximation, `distinct` separation and fixed point.
pub fn infer(u: &TypeUniverse, opts: &InferOptions) -> SubsumptionOrder {
    let mut init = initial_approximation(u, opts.depth);
    for &(a, b) in &opts.distinct {
        separate(&mut init, a, b);
        separate(&mut init, b, a);
    }
    greatest_fixed_point(u, &init)
}

/// The inferred order ⪯, its starting approximation, and the partial
/// order over equivalence-class representatives.
#[derive(Clone, Debug)]
pub struct SubsumptionOrder {
    raw: CandidateSubsumption,
    init: CandidateSubsumption,
    poset: Poset,
}

impl SubsumptionOrder {
    pub fn new(raw: CandidateSubsumption, init: CandidateSubsumption) -> Self {
        let poset = Poset::from_leq(raw.len(), |a, b| raw.contains(a, b));
        SubsumptionOrder { raw, init, poset }
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// `strong ⪯ weak`.
    pub fn leq(&self, strong: TypeId, weak: TypeId) -> bool {
        self.raw.contains(strong, weak)
    }

    pub fn relation(&self) -> &CandidateSubsumption {
        &self.raw
    }

    pub fn initial(&self) -> &CandidateSubsumption {
        &self.init
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    /// Equivalence classes with more than one member, smallest id first.
    pub fn equivalence_classes(&self) -> Vec<Vec<TypeId>> {
        let mut classes: Vec<Vec<TypeId>> = Vec::new();
        for t in 0..self.len() {
            let t = TypeId(t as u32);
            let rep = self.poset.rep(t);
            if rep == t {
                classes.push(vec![t]);
            } else if let Some(c) = classes.iter_mut().find(|c| c[0] == rep) {
                c.push(t);
            }
        }
        classes.retain(|c| c.len() > 1);
        classes
    }

    /// Hasse diagram over the representatives in `subset` (all types if
    /// `None`), as `(weaker, stronger)` cover pairs.
    pub fn covers_within(&self, subset: Option<&[TypeId]>) -> Vec<(TypeId, TypeId)> {
        let mut nodes: Vec<TypeId> = match subset {
            Some(s) => s.iter().map(|&t| self.poset.rep(t)).collect(),
            None => (0..self.len() as u32)
                .map(TypeId)
                .filter(|&t| self.poset.is_rep(t))
                .collect(),
        };
        nodes.sort_unstable();
        nodes.dedup();
        let p = &self.poset;
        let mut out = Vec::new();
        for &lo in &nodes {
            for &hi in &nodes {
                if p.lt(lo, hi) && !nodes.iter().any(|&m| p.lt(lo, m) && p.lt(m, hi)) {
                    out.push((hi, lo));
                }
            }
        }
        out
    }

    pub fn covers(&self) -> Vec<(TypeId, TypeId)> {
        self.covers_within(None)
    }

    /// DOT rendering of the Hasse diagram, edges from weaker to stronger,
    /// nodes and edges sorted by display name.
    pub fn to_dot(&self, u: &TypeUniverse, subset: Option<&[TypeId]>) -> String {
        let covers = self.covers_within(subset);
        let mut nodes: Vec<String> = match subset {
            Some(s) => s.iter().map(|&t| u.display(self.poset.rep(t))).collect(),
            None => u
                .ids()
                .filter(|&t| self.poset.is_rep(t))
                .map(|t| u.display(t))
                .collect(),
        };
        nodes.sort();
        nodes.dedup();
        let mut edges: Vec<(String, String)> = covers
            .iter()
            .map(|&(hi, lo)| (u.display(hi), u.display(lo)))
            .collect();
        edges.sort();
        let mut out = String::from("digraph subsumption {\n");
        for n in &nodes {
            let _ = writeln!(out, "  \"{n}\";");
        }
        for (hi, lo) in &edges {
            let _ = writeln!(out, "  \"{hi}\" -> \"{lo}\";");
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::UniverseBuilder;

    #[test]
    fn unrelated_structs_only_reach_any() {
        let mut b = UniverseBuilder::new();
        let int = b.builtin("int");
        let a = b.declare_struct("_A");
        b.define_struct(a, vec![("x".into(), int)]).unwrap();
        let c = b.declare_struct("_C");
        b.define_struct(c, vec![("y".into(), int)]).unwrap();
        let u = b.finish();
        let order = infer(&u, &InferOptions::default());
        for s in u.ids() {
            for t in u.ids() {
                let expect = s == t || t == u.any();
                assert_eq!(order.leq(s, t), expect, "{} vs {}", u.display(s), u.display(t));
            }
        }
    }

    #[test]
    fn strengthenable_edge_enables_simulation() {
        // Ival -DATA†-> sig, DirIval has no DATA edge of its own.
        let mut b = UniverseBuilder::new();
        let int = b.builtin("int");
        let ival = b.declare_struct("_Ival");
        b.define_struct(ival, vec![("min".into(), int)]).unwrap();
        let dir = b.declare_struct("_DirIval");
        b.define_struct(dir, vec![("min".into(), int), ("delta".into(), int)])
            .unwrap();
        let sig = b.function(vec![(ival, true), (int, false)], int);
        let label = RelationLabel::ArgSignature {
            op: "DATA".into(),
            index: 1,
            arity: 2,
        };
        b.add_pair(label.clone(), ival, sig, true, true);
        let u = b.finish();
        let mut r = CandidateSubsumption::identity(u.len());
        r.insert(dir, ival);
        assert!(sigma_simulates(&r, &u, &label, dir, ival));
        assert!(sigma_simulates(
            &r,
            &u,
            &RelationLabel::FieldSelect("min".into()),
            dir,
            ival
        ));

        let mut b = UniverseBuilder::new();
        let int = b.builtin("int");
        let ival = b.declare_struct("_Ival");
        b.define_struct(ival, vec![("min".into(), int)]).unwrap();
        let dir = b.declare_struct("_DirIval");
        b.define_struct(dir, vec![("min".into(), int), ("delta".into(), int)])
            .unwrap();
        let sig = b.function(vec![(ival, false), (int, false)], int);
        b.add_pair(label.clone(), ival, sig, false, true);
        let u = b.finish();
        let mut r = CandidateSubsumption::identity(u.len());
        r.insert(dir, ival);
        assert!(!sigma_simulates(&r, &u, &label, dir, ival));
        assert!(!infer(&u, &InferOptions::default()).leq(dir, ival));
    }

    #[test]
    fn layered_matches_brute_force_on_small_universe() {
        let mut b = UniverseBuilder::new();
        let int = b.builtin("int");
        let ch = b.builtin("char");
        let s = b.declare_struct("_S");
        b.define_struct(s, vec![("a".into(), int)]).unwrap();
        let s2 = b.declare_struct("_S2");
        b.define_struct(s2, vec![("a".into(), int), ("b".into(), ch)])
            .unwrap();
        b.pointer(s);
        b.pointer(s2);
        b.protocol("P");
        let u = b.finish();
        let (layered, _) = initial_approximation_layered(&u, 3);
        assert_eq!(layered, initial_approximation(&u, 3));
    }
}
