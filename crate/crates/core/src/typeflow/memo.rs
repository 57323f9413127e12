use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use crate::antichain::{Antichain, Poset};
use crate::universe::TypeId;

use super::{flow_naive, LabelId, MatchRelation};

type FlowPair = (Antichain, Antichain);

/// Lookup tables for the symbolic flow function.
///
/// Singleton flows F_γ({a}, {b}) are filled on first use (or all at once
/// through [`precompute`](Self::precompute)); whole antichain pairs are
/// cached as well. Readers share the tables; a miss computes outside the
/// lock and inserts, so racing writers store equal values.
#[derive(Debug)]
pub struct FlowMemo {
    enabled: bool,
    singletons: RwLock<HashMap<(LabelId, TypeId, TypeId), FlowPair>>,
    pairs: RwLock<HashMap<(LabelId, Antichain, Antichain), FlowPair>>,
    singleton_evals: AtomicU64,
    singleton_hits: AtomicU64,
    pair_hits: AtomicU64,
}

/// Counter snapshot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FlowStats {
    pub singleton_evals: u64,
    pub singleton_hits: u64,
    pub pair_hits: u64,
}

impl Default for FlowMemo {
    fn default() -> Self {
        FlowMemo::new()
    }
}

impl FlowMemo {
    pub fn new() -> Self {
        FlowMemo::with_caching(true)
    }

    /// Counts singleton evaluations but never stores anything.
    pub fn unmemoized() -> Self {
        FlowMemo::with_caching(false)
    }

    fn with_caching(enabled: bool) -> Self {
        FlowMemo {
            enabled,
            singletons: RwLock::new(HashMap::new()),
            pairs: RwLock::new(HashMap::new()),
            singleton_evals: AtomicU64::new(0),
            singleton_hits: AtomicU64::new(0),
            pair_hits: AtomicU64::new(0),
        }
    }

    pub fn stats(&self) -> FlowStats {
        FlowStats {
            singleton_evals: self.singleton_evals.load(Ordering::Relaxed),
            singleton_hits: self.singleton_hits.load(Ordering::Relaxed),
            pair_hits: self.pair_hits.load(Ordering::Relaxed),
        }
    }

    /// Fills the singleton table for `label` in one sweep over M: each
    /// pair (x, y) contributes to every (t, u) with x ⪯ t and y ⪯ u.
    pub fn precompute(&self, label: LabelId, m: &MatchRelation, poset: &Poset) {
        let mut acc: HashMap<(TypeId, TypeId), (Vec<TypeId>, Vec<TypeId>)> = HashMap::new();
        for &(x, y) in m.pairs() {
            for t in poset.up_set(x).ones().map(|i| TypeId(i as u32)) {
                if !poset.is_rep(t) {
                    continue;
                }
                for u in poset.up_set(y).ones().map(|i| TypeId(i as u32)) {
                    if !poset.is_rep(u) {
                        continue;
                    }
                    let e = acc.entry((t, u)).or_default();
                    e.0.push(x);
                    e.1.push(y);
                }
            }
        }
        let mut table = self.singletons.write().unwrap();
        for ((t, u), (l, r)) in acc {
            table.insert(
                (label, t, u),
                (
                    Antichain::restrict_maximal(poset, l),
                    Antichain::restrict_maximal(poset, r),
                ),
            );
        }
        let reps: Vec<TypeId> = (0..poset.len() as u32)
            .map(TypeId)
            .filter(|&t| poset.is_rep(t))
            .collect();
        for &t in &reps {
            for &u in &reps {
                table.entry((label, t, u)).or_default();
            }
        }
    }

    /// F_γ({a}, {b}).
    pub fn singleton(&self, label: LabelId, m: &MatchRelation, a: TypeId, b: TypeId, poset: &Poset) -> FlowPair {
        if self.enabled {
            if let Some(hit) = self.singletons.read().unwrap().get(&(label, a, b)) {
                self.singleton_hits.fetch_add(1, Ordering::Relaxed);
                return hit.clone();
            }
        }
        self.singleton_evals.fetch_add(1, Ordering::Relaxed);
        let out = flow_naive(
            m,
            &Antichain::singleton(poset, a),
            &Antichain::singleton(poset, b),
            poset,
        );
        if self.enabled {
            self.singletons
                .write()
                .unwrap()
                .insert((label, a, b), out.clone());
        }
        out
    }

    fn lookup_pair(&self, label: LabelId, a: &Antichain, b: &Antichain) -> Option<FlowPair> {
        if !self.enabled || (a.len() <= 1 && b.len() <= 1) {
            return None;
        }
        let hit = self
            .pairs
            .read()
            .unwrap()
            .get(&(label, a.clone(), b.clone()))
            .cloned();
        if hit.is_some() {
            self.pair_hits.fetch_add(1, Ordering::Relaxed);
        }
        hit
    }

    fn store_pair(&self, label: LabelId, a: &Antichain, b: &Antichain, out: &FlowPair) {
        if self.enabled && (a.len() > 1 || b.len() > 1) {
            self.pairs
                .write()
                .unwrap()
                .insert((label, a.clone(), b.clone()), out.clone());
        }
    }
}

/// 𝓕_γ(A, B) = ⊔ F_γ({a}, {b}) over a ∈ A, b ∈ B.
pub fn flow_symbolic(
    memo: &FlowMemo,
    label: LabelId,
    m: &MatchRelation,
    a: &Antichain,
    b: &Antichain,
    poset: &Poset,
) -> FlowPair {
    if let Some(hit) = memo.lookup_pair(label, a, b) {
        return hit;
    }
    let mut left = Antichain::empty();
    let mut right = Antichain::empty();
    for &x in a.members() {
        for &y in b.members() {
            let (l, r) = memo.singleton(label, m, x, y, poset);
            left = left.join(&l, poset);
            right = right.join(&r, poset);
        }
    }
    let out = (left, right);
    memo.store_pair(label, a, b, &out);
    out
}
