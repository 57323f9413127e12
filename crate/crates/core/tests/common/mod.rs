#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use moot_core::antichain::{Antichain, Poset};
use moot_core::frontend::{derive_call_relations, expand_param_typedefs, parse, CallRelations};
use moot_core::frontend::ast::Program;
use moot_core::hierarchy::{infer, InferOptions, SubsumptionOrder};
use moot_core::diag::Span;
use moot_core::typeflow::{LabelId, MatchRelation, MatchTable, NodeId, SyntaxGraph, Typing};
use moot_core::universe::{ProgramTypes, TypeId, TypeUniverse};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn fixture(name: &str) -> String {
    // Resolves from either crate that includes this module.
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub struct Pipeline {
    pub source: String,
    pub program: Program,
    pub pt: ProgramTypes,
    pub order: SubsumptionOrder,
    pub rels: CallRelations,
}

impl Pipeline {
    pub fn load(name: &str) -> Self {
        Self::from_source(fixture(name))
    }

    pub fn from_source(source: String) -> Self {
        let parsed = parse(&source).expect("parses");
        let program = expand_param_typedefs(&parsed).expect("expands").program;
        let pt = TypeUniverse::from_program(&program).expect("universe");
        let order = infer(
            &pt.universe,
            &InferOptions {
                distinct: pt.distinct.clone(),
                ..InferOptions::default()
            },
        );
        let rels = derive_call_relations(&pt, &order).expect("cross-closed relations");
        Pipeline {
            source,
            program,
            pt,
            order,
            rels,
        }
    }

    pub fn ty(&self, spelling: &str) -> TypeId {
        self.pt
            .universe
            .find(spelling)
            .unwrap_or_else(|| panic!("no type {spelling}"))
    }

    pub fn poset(&self) -> &Poset {
        self.order.poset()
    }

    pub fn chain(&self, spellings: &[&str]) -> Antichain {
        Antichain::restrict_maximal(self.poset(), spellings.iter().map(|s| self.ty(s)))
    }

    pub fn show(&self, a: &Antichain) -> Vec<String> {
        let mut v: Vec<String> = a.members().iter().map(|&t| self.pt.universe.display(t)).collect();
        v.sort();
        v
    }
}

pub fn t(i: usize) -> TypeId {
    TypeId(i as u32)
}

/// Random partial order on `n` elements: each element picks a few weaker
/// elements among the ones with a larger index.
pub fn random_poset(rng: &mut impl Rng, n: usize, density: f64) -> Poset {
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                pairs.push((t(a), t(b)));
            }
        }
    }
    Poset::from_pairs(n, pairs)
}

/// Random pairs closed under (t, u'), (t', u) ∈ M, t' ⪯ t, u' ⪯ u ⇒ (t, u).
pub fn random_cross_closed(rng: &mut impl Rng, p: &Poset, density: f64) -> MatchRelation {
    let n = p.len();
    let mut m = vec![vec![false; n]; n];
    for row in m.iter_mut() {
        for cell in row.iter_mut() {
            *cell = rng.gen_bool(density);
        }
    }
    loop {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| m[a][b])
            .collect();
        let mut added = false;
        for &(a, u1) in &pairs {
            for &(a1, b) in &pairs {
                if p.leq(t(a1), t(a)) && p.leq(t(u1), t(b)) && !m[a][b] {
                    m[a][b] = true;
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    MatchRelation::new(
        "m",
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| m[a][b])
            .map(|(a, b)| (t(a), t(b))),
    )
}

pub fn random_antichain(rng: &mut impl Rng, p: &Poset) -> Antichain {
    let k = rng.gen_range(0..=3);
    Antichain::restrict_maximal(p, (0..k).map(|_| t(rng.gen_range(0..p.len()))))
}

/// (pair, strengthenable) lists, one per relation.
pub type Rels = Vec<Vec<(usize, usize, bool)>>;

pub fn random_relations(rng: &mut StdRng, n: usize) -> Rels {
    let k = rng.gen_range(1..=4);
    (0..k)
        .map(|_| {
            let density = rng.gen_range(0.05..0.35);
            let mut pairs = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    if rng.gen_bool(density) {
                        pairs.push((a, b, rng.gen_bool(0.25)));
                    }
                }
            }
            pairs
        })
        .collect()
}

/// One application of F on a dense boolean matrix.
fn step(n: usize, rels: &Rels, r: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let mut next = r.to_vec();
    for tt in 0..n {
        for t2 in 0..n {
            if !r[tt][t2] {
                continue;
            }
            let ok = rels.iter().all(|rel| {
                rel.iter().filter(|&&(a, _, _)| a == t2).all(|&(_, u2, _)| {
                    (0..n).any(|u| {
                        if !r[u][u2] {
                            return false;
                        }
                        let direct = rel.iter().any(|&(a, b, _)| a == tt && b == u);
                        let via = (0..n).any(|v| r[tt][v] && rel.iter().any(|&(a, b, s)| s && a == v && b == u));
                        direct || via
                    })
                })
            });
            next[tt][t2] = ok;
        }
    }
    next
}

pub fn naive_gfp(n: usize, rels: &Rels) -> Vec<Vec<bool>> {
    let mut r = vec![vec![true; n]; n];
    loop {
        let next = step(n, rels, &r);
        if next == r {
            return r;
        }
        r = next;
    }
}

fn down(p: &Poset, a: &Antichain) -> BTreeSet<usize> {
    (0..p.len())
        .filter(|&x| a.members().iter().any(|&m| p.leq(t(x), m)))
        .collect()
}

fn maxima(p: &Poset, s: &BTreeSet<usize>) -> Vec<usize> {
    s.iter()
        .copied()
        .filter(|&x| !s.iter().any(|&y| p.lt(t(x), t(y))))
        .collect()
}

/// Filters the explicit downward closed sets through M, then keeps the
/// maximal survivors.
pub fn powerset_flow(p: &Poset, m: &MatchRelation, a: &Antichain, b: &Antichain) -> (Vec<usize>, Vec<usize>) {
    let (da, db) = (down(p, a), down(p, b));
    let left: BTreeSet<usize> = da
        .iter()
        .copied()
        .filter(|&x| db.iter().any(|&y| m.contains(t(x), t(y))))
        .collect();
    let right: BTreeSet<usize> = db
        .iter()
        .copied()
        .filter(|&y| da.iter().any(|&x| m.contains(t(x), t(y))))
        .collect();
    (maxima(p, &left), maxima(p, &right))
}

pub fn setup(seed: u64) -> (StdRng, Poset) {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.gen_range(1..=10);
    let density = rng.gen_range(0.1..0.5);
    let p = random_poset(&mut rng, n, density);
    (rng, p)
}

pub struct Instance {
    pub p: Poset,
    pub table: MatchTable,
    pub graph: SyntaxGraph,
    pub initial: Typing,
}

pub fn random_instance(seed: u64) -> Instance {
    let (mut rng, p) = setup(seed);
    let mut table = MatchTable::new();
    for _ in 0..rng.gen_range(1..=3) {
        let density = rng.gen_range(0.05..0.4);
        table.add(random_cross_closed(&mut rng, &p, density));
    }
    let nodes = rng.gen_range(2..=8);
    let mut graph = SyntaxGraph::new();
    for i in 0..nodes {
        graph.add_node(Span::synthetic(), format!("n{i}"));
    }
    for _ in 0..rng.gen_range(1..=12) {
        let a = rng.gen_range(0..nodes) as u32;
        let b = rng.gen_range(0..nodes) as u32;
        let l = rng.gen_range(0..table.len()) as u32;
        graph.add_edge(NodeId(a), NodeId(b), LabelId(l));
    }
    let top = Antichain::restrict_maximal(&p, (0..p.len()).map(t));
    let mut initial = Typing::uniform(nodes, top);
    for i in 0..nodes {
        if rng.gen_bool(0.4) {
            initial.assignment[i] = random_antichain(&mut rng, &p);
        }
    }
    Instance {
        p,
        table,
        graph,
        initial,
    }
}

/// 200 types in a random tree (index 0 on top), a 5000-edge graph over
/// 1000 nodes and three relations derived from the order. Edges respect a
/// planted typing so the run narrows instead of emptying out.
pub fn perf_setup() -> (Poset, MatchTable, SyntaxGraph, Typing) {
    let mut rng = StdRng::seed_from_u64(200);
    let n = 200;
    let parents: Vec<(TypeId, TypeId)> =
        (1..n).map(|i| (t(i), t(rng.gen_range(0..i)))).collect();
    let p = Poset::from_pairs(n, parents);
    let all = |f: &dyn Fn(usize, usize) -> bool| -> Vec<_> {
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| f(a, b))
            .map(|(a, b)| (t(a), t(b)))
            .collect()
    };
    let mut table = MatchTable::new();
    table.add(MatchRelation::new("subsume", all(&|a, b| p.leq(t(a), t(b)))));
    table.add(MatchRelation::new("widen", all(&|a, b| p.leq(t(b), t(a)))));
    table.add(MatchRelation::new("same", (0..n).map(|a| (t(a), t(a)))));

    let pool: Vec<usize> = (0..20).map(|_| rng.gen_range(0..n)).collect();
    let nodes = 1000;
    let planted: Vec<usize> = (0..nodes).map(|_| pool[rng.gen_range(0..pool.len())]).collect();
    let mut g = SyntaxGraph::new();
    for i in 0..nodes {
        g.add_node(Span::synthetic(), format!("n{i}"));
    }
    while g.edge_count() < 5000 {
        let (a, b) = (rng.gen_range(0..nodes), rng.gen_range(0..nodes));
        let l = LabelId(rng.gen_range(0..3));
        if table.get(l).contains(t(planted[a]), t(planted[b])) {
            g.add_edge(NodeId(a as u32), NodeId(b as u32), l);
        }
    }
    let mut typing = Typing::uniform(nodes, Antichain::empty());
    for (i, &d) in planted.iter().enumerate() {
        typing.assignment[i] = if rng.gen_bool(0.05) {
            Antichain::singleton(&p, t(d))
        } else {
            let others = (0..4).map(|_| t(pool[rng.gen_range(0..pool.len())]));
            Antichain::restrict_maximal(&p, others.chain([t(d)]))
        };
    }
    (p, table, g, typing)
}
