//! Antichains of types over a fixed partial order, used as a symbolic
//! representation of downward-closed sets.

use fixedbitset::FixedBitSet;

use crate::universe::TypeId;

/// A finite preorder over dense type ids, answered from reachability
/// bitsets. Equivalent types are collapsed onto a representative (the
/// smallest id in their class); antichains only ever hold
/// representatives, so the order they see is a partial order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    /// `up[t]` holds every `u` with `t ⪯ u`.
    up: Vec<FixedBitSet>,
    /// `down[t]` holds every `u` with `u ⪯ t`.
    down: Vec<FixedBitSet>,
    rep: Vec<TypeId>,
}

impl Poset {
    /// Builds the poset from a reflexive, transitive `leq` over `0..n`.
    pub fn from_leq(n: usize, mut leq: impl FnMut(TypeId, TypeId) -> bool) -> Self {
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for a in 0..n {
            for b in 0..n {
                if a == b || leq(TypeId(a as u32), TypeId(b as u32)) {
                    up[a].insert(b);
                    down[b].insert(a);
                }
            }
        }
        let rep = (0..n)
            .map(|t| {
                let class = up[t].intersection(&down[t]).next().unwrap_or(t);
                TypeId(class as u32)
            })
            .collect();
        Poset { up, down, rep }
    }

    /// Reflexive-transitive closure of the given pairs.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (TypeId, TypeId)>) -> Self {
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (t, row) in up.iter_mut().enumerate() {
            row.insert(t);
        }
        for (a, b) in pairs {
            up[a.index()].insert(b.index());
        }
        // Warshall over bitset rows.
        for k in 0..n {
            let row_k = up[k].clone();
            for row in up.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        Poset::from_leq(n, |a, b| up[a.index()].contains(b.index()))
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    pub fn leq(&self, a: TypeId, b: TypeId) -> bool {
        self.up[a.index()].contains(b.index())
    }

    /// `a ≺ b`: below and not equivalent.
    pub fn lt(&self, a: TypeId, b: TypeId) -> bool {
        self.leq(a, b) && !self.leq(b, a)
    }

    pub fn rep(&self, t: TypeId) -> TypeId {
        self.rep[t.index()]
    }

    pub fn is_rep(&self, t: TypeId) -> bool {
        self.rep[t.index()] == t
    }

    pub fn up_set(&self, t: TypeId) -> &FixedBitSet {
        &self.up[t.index()]
    }

    pub fn down_set(&self, t: TypeId) -> &FixedBitSet {
        &self.down[t.index()]
    }

    /// Representatives below `t`, including `t`'s own representative.
    pub fn below(&self, t: TypeId) -> impl Iterator<Item = TypeId> + '_ {
        self.down[t.index()]
            .ones()
            .map(|i| TypeId(i as u32))
            .filter(|&u| self.is_rep(u))
    }
}

/// A set of pairwise incomparable types, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Antichain {
    members: Vec<TypeId>,
}

impl Antichain {
    pub fn empty() -> Self {
        Antichain::default()
    }

    pub fn singleton(poset: &Poset, t: TypeId) -> Self {
        Antichain {
            members: vec![poset.rep(t)],
        }
    }

    /// ⌈U⌉: the maximal elements of `u`.
    pub fn restrict_maximal(poset: &Poset, u: impl IntoIterator<Item = TypeId>) -> Self {
        let mut cand: Vec<TypeId> = u.into_iter().map(|t| poset.rep(t)).collect();
        cand.sort_unstable();
        cand.dedup();
        let members = cand
            .iter()
            .copied()
            .filter(|&a| !cand.iter().any(|&b| poset.lt(a, b)))
            .collect();
        Antichain { members }
    }

    /// Wraps an already maximal, sorted set of representatives.
    pub fn from_sorted_unchecked(members: Vec<TypeId>) -> Self {
        Antichain { members }
    }

    pub fn members(&self) -> &[TypeId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn as_singleton(&self) -> Option<TypeId> {
        match self.members.as_slice() {
            [t] => Some(*t),
            _ => None,
        }
    }

    pub fn contains(&self, t: TypeId) -> bool {
        self.members.binary_search(&t).is_ok()
    }

    /// A⁺ as a bitset over all type ids (representatives only).
    pub fn closure_bits(&self, poset: &Poset) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(poset.len());
        for &a in &self.members {
            bits.union_with(poset.down_set(a));
        }
        for t in 0..poset.len() {
            if bits.contains(t) && !poset.is_rep(TypeId(t as u32)) {
                bits.set(t, false);
            }
        }
        bits
    }

    /// A⁺ = {t | ∃a ∈ A. t ⪯ a}, restricted to representatives.
    pub fn downward_closure(&self, poset: &Poset) -> Vec<TypeId> {
        self.closure_bits(poset)
            .ones()
            .map(|i| TypeId(i as u32))
            .collect()
    }

    /// True if `t` lies in A⁺.
    pub fn covers(&self, poset: &Poset, t: TypeId) -> bool {
        self.members.iter().any(|&a| poset.leq(t, a))
    }

    /// A ⊑ B.
    pub fn leq(&self, other: &Antichain, poset: &Poset) -> bool {
        self.members.iter().all(|&a| other.covers(poset, a))
    }

    /// A ⊔ B = ⌈A ∪ B⌉.
    pub fn join(&self, other: &Antichain, poset: &Poset) -> Antichain {
        if self.members.is_empty() {
            return other.clone();
        }
        if other.members.is_empty() {
            return self.clone();
        }
        Antichain::restrict_maximal(
            poset,
            self.members.iter().chain(other.members.iter()).copied(),
        )
    }
}

impl FromIterator<TypeId> for Antichain {
    /// Collects without reduction; callers guarantee incomparability.
    fn from_iter<I: IntoIterator<Item = TypeId>>(iter: I) -> Self {
        let mut members: Vec<TypeId> = iter.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Antichain { members }
    }
}
