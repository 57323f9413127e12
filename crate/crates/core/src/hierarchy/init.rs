use std::collections::HashMap;

use crate::universe::{TypeId, TypeKind, TypeUniverse};

use super::CandidateSubsumption;

/// Default depth for the syntactic struct/pointer/function comparison.
pub const DEFAULT_DEPTH: u32 = 3;

/// Surface-syntax comparison of `strong ⪯ weak`, exploring components
/// up to `depth` levels.
///
/// Reflexive, and transitive at every fixed depth, so the relation it
/// induces is already a preorder.
pub fn syntactic_le(u: &TypeUniverse, strong: TypeId, weak: TypeId, depth: u32) -> bool {
    SynCmp {
        u,
        memo: HashMap::new(),
    }
    .le(strong, weak, depth)
}

struct SynCmp<'a> {
    u: &'a TypeUniverse,
    memo: HashMap<(TypeId, TypeId, u32), bool>,
}

impl SynCmp<'_> {
    fn le(&mut self, a: TypeId, b: TypeId, depth: u32) -> bool {
        if a == b {
            return true;
        }
        if let Some(&r) = self.memo.get(&(a, b, depth)) {
            return r;
        }
        let r = self.compute(a, b, depth);
        self.memo.insert((a, b, depth), r);
        r
    }

    fn sub(&mut self, a: TypeId, b: TypeId, depth: u32) -> bool {
        depth == 0 || self.le(a, b, depth - 1)
    }

    fn compute(&mut self, a: TypeId, b: TypeId, depth: u32) -> bool {
        let u = self.u;
        match (u.kind(a), u.kind(b)) {
            (_, TypeKind::Any) => true,
            (TypeKind::Any, _) => false,
            (TypeKind::Function { .. }, TypeKind::Protocol(_) | TypeKind::Parameter { .. }) => {
                false
            }
            (_, TypeKind::Protocol(_) | TypeKind::Parameter { .. }) => true,
            (TypeKind::Protocol(_) | TypeKind::Parameter { .. }, _) => false,
            (TypeKind::Builtin(x), TypeKind::Builtin(y)) => x == y,
            (TypeKind::Struct { fields: fa, .. }, TypeKind::Struct { fields: fb, .. }) => {
                fb.iter().all(|(name, tb)| {
                    match fa.iter().find(|(n, _)| n == name) {
                        Some(&(_, ta)) => self.sub(ta, *tb, depth),
                        None => false,
                    }
                })
            }
            (TypeKind::Pointer(pa), TypeKind::Pointer(pb)) => self.sub(*pa, *pb, depth),
            (
                TypeKind::Function { args: aa, ret: ra },
                TypeKind::Function { args: ab, ret: rb },
            ) => {
                aa.len() == ab.len()
                    && aa
                        .iter()
                        .zip(ab)
                        .all(|(&(ta, sa), &(tb, sb))| (!sb || sa) && self.sub(ta, tb, depth))
                    && self.sub(*ra, *rb, depth)
            }
            _ => false,
        }
    }
}

/// R⪯^init by comparing every pair.
pub fn initial_approximation(u: &TypeUniverse, depth: u32) -> CandidateSubsumption {
    let n = u.len();
    let mut cmp = SynCmp {
        u,
        memo: HashMap::new(),
    };
    let mut r = CandidateSubsumption::identity(n);
    for a in u.ids() {
        for b in u.ids() {
            if a != b && cmp.le(a, b, depth) {
                r.insert(a, b);
            }
        }
    }
    r
}

/// Same relation as [`initial_approximation`], built by inserting types one
/// at a time and walking the current preorder layer by layer: from the
/// maxima downwards for the types above the new one, from the minima
/// upwards for the types below it. A failed comparison prunes everything
/// on the far side of the compared type.
///
/// Returns the relation and the number of syntactic comparisons made.
pub fn initial_approximation_layered(
    u: &TypeUniverse,
    depth: u32,
) -> (CandidateSubsumption, usize) {
    let n = u.len();
    let mut cmp = SynCmp {
        u,
        memo: HashMap::new(),
    };
    let mut r = CandidateSubsumption::identity(n);
    let mut inserted: Vec<TypeId> = Vec::new();
    let mut comparisons = 0usize;

    for t in u.ids() {
        let above = layered_walk(&r, &inserted, true, |x| {
            comparisons += 1;
            cmp.le(t, x, depth)
        });
        let below = layered_walk(&r, &inserted, false, |x| {
            comparisons += 1;
            cmp.le(x, t, depth)
        });
        for x in above {
            r.insert(t, x);
        }
        for x in below {
            r.insert(x, t);
        }
        inserted.push(t);
    }
    (r, comparisons)
}

/// Walks `inserted` from its extremal layer inwards, visiting a type only
/// if some neighbour one layer out passed `test`. With `downwards`, starts
/// at the maxima and descends; otherwise starts at the minima and climbs.
fn layered_walk(
    r: &CandidateSubsumption,
    inserted: &[TypeId],
    downwards: bool,
    mut test: impl FnMut(TypeId) -> bool,
) -> Vec<TypeId> {
    // `outer(x, y)`: y is strictly further out than x in walk direction.
    let outer = |x: TypeId, y: TypeId| {
        if downwards {
            r.contains(x, y) && !r.contains(y, x)
        } else {
            r.contains(y, x) && !r.contains(x, y)
        }
    };
    let mut passed: Vec<TypeId> = Vec::new();
    let mut visited = vec![false; r.len()];
    let mut frontier: Vec<TypeId> = inserted
        .iter()
        .copied()
        .filter(|&x| !inserted.iter().any(|&y| outer(x, y)))
        .collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in frontier {
            if visited[x.index()] {
                continue;
            }
            visited[x.index()] = true;
            if !test(x) {
                continue;
            }
            passed.push(x);
            // Next layer: the types directly inside x.
            for &y in inserted {
                if visited[y.index()] || !outer(y, x) {
                    continue;
                }
                let direct = !inserted
                    .iter()
                    .any(|&z| outer(y, z) && outer(z, x));
                if direct {
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    passed
}

/// Removes `a ⪯ b` together with every `a ⪯ c` where `c ⪯ b`, which keeps
/// the relation transitive.
pub fn separate(r: &mut CandidateSubsumption, a: TypeId, b: TypeId) {
    if a == b {
        return;
    }
    let doomed: Vec<TypeId> = r
        .row(a)
        .ones()
        .map(|i| TypeId(i as u32))
        .filter(|&c| c != a && r.contains(c, b))
        .collect();
    for c in doomed {
        r.remove(a, c);
    }
}
