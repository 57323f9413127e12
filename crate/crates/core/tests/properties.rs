mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::{perf_setup, random_antichain, random_cross_closed, random_instance, setup, t};
use moot_core::antichain::{Antichain, Poset};
use moot_core::typeflow::{
    classify_typing, flow_symbolic, run_typing, Classification, FlowMemo, LabelId, RunOptions, Schedule,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn closure(p: &Poset, a: &Antichain) -> BTreeSet<usize> {
    (0..p.len())
        .filter(|&x| a.members().iter().any(|&m| p.leq(t(x), m)))
        .collect()
}

fn random_subset(rng: &mut StdRng, n: usize) -> Vec<usize> {
    (0..n).filter(|_| rng.gen_bool(0.3)).collect()
}

/// A ⊑ B with one side taken from the other's downward closure.
fn weaker_pair(rng: &mut StdRng, p: &Poset) -> (Antichain, Antichain) {
    let big = random_antichain(rng, p);
    let below: Vec<usize> = closure(p, &big).into_iter().collect();
    let small = Antichain::restrict_maximal(
        p,
        below.iter().filter(|_| rng.gen_bool(0.5)).map(|&x| t(x)),
    );
    (small, big)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn maxima_restriction_is_idempotent(seed in any::<u64>()) {
        let (mut rng, p) = setup(seed);
        let s = random_subset(&mut rng, p.len());
        let once = Antichain::restrict_maximal(&p, s.iter().map(|&x| t(x)));
        let twice = Antichain::restrict_maximal(&p, once.members().iter().copied());
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn order_is_inclusion_of_closures(seed in any::<u64>()) {
        let (mut rng, p) = setup(seed);
        let a = random_antichain(&mut rng, &p);
        let b = random_antichain(&mut rng, &p);
        prop_assert_eq!(a.leq(&b, &p), closure(&p, &a).is_subset(&closure(&p, &b)));
    }

    #[test]
    fn join_closure_is_union(seed in any::<u64>()) {
        let (mut rng, p) = setup(seed);
        let a = random_antichain(&mut rng, &p);
        let b = random_antichain(&mut rng, &p);
        let union: BTreeSet<usize> = closure(&p, &a).union(&closure(&p, &b)).copied().collect();
        prop_assert_eq!(closure(&p, &a.join(&b, &p)), union);
    }

    #[test]
    fn flow_is_monotone_and_contractive(seed in any::<u64>()) {
        let (mut rng, p) = setup(seed);
        let density = rng.gen_range(0.02..0.3);
        let m = random_cross_closed(&mut rng, &p, density);
        let (a, a2) = weaker_pair(&mut rng, &p);
        let (b, b2) = weaker_pair(&mut rng, &p);
        let memo = FlowMemo::new();
        let (fa, fb) = flow_symbolic(&memo, LabelId(0), &m, &a, &b, &p);
        let (ga, gb) = flow_symbolic(&memo, LabelId(0), &m, &a2, &b2, &p);
        prop_assert!(fa.leq(&ga, &p) && fb.leq(&gb, &p));
        prop_assert!(fa.leq(&a, &p) && fb.leq(&b, &p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn typing_is_confluent_across_schedules(seed in any::<u64>()) {
        let inst = random_instance(seed);
        let memo = FlowMemo::new();
        let fifo = run_typing(&inst.graph, &inst.table, &inst.p, &memo, inst.initial.clone(), RunOptions::default());
        let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..20 {
            let mut pick = |len: usize| rng.gen_range(0..len);
            let opts = RunOptions { schedule: Schedule::Custom(&mut pick), trace: None };
            let other = run_typing(&inst.graph, &inst.table, &inst.p, &memo, inst.initial.clone(), opts);
            prop_assert_eq!(&other.typing, &fifo.typing);
            prop_assert!(other.steps <= other.bound.max(inst.graph.edge_count()));
        }
    }

    #[test]
    fn singleton_fixed_points_satisfy_every_edge(seed in any::<u64>()) {
        let inst = random_instance(seed);
        let out = run_typing(&inst.graph, &inst.table, &inst.p, &FlowMemo::new(), inst.initial.clone(), RunOptions::default());
        prop_assert!(out.typing.leq(&inst.initial, &inst.p));
        if let Classification::Valid(delta) = classify_typing(&out.typing) {
            for (_, e) in inst.graph.edges() {
                let (a, b) = (delta[e.from.index()], delta[e.to.index()]);
                prop_assert!(inst.table.get(e.label).contains(a, b), "edge {:?} violated", e);
            }
        }
    }
}

#[test]
fn memoized_flow_needs_far_fewer_singleton_evaluations() {
    let (p, table, g, typing) = perf_setup();
    let start = Instant::now();
    let memo = FlowMemo::new();
    let fast = run_typing(&g, &table, &p, &memo, typing.clone(), RunOptions::default());
    let plain = FlowMemo::unmemoized();
    let slow = run_typing(&g, &table, &p, &plain, typing, RunOptions::default());
    let elapsed = start.elapsed().as_secs_f64();
    assert_eq!(fast.typing, slow.typing);
    let (m, u) = (memo.stats().singleton_evals, plain.stats().singleton_evals);
    assert!(m > 0);
    assert!(fast.steps > 5000);
    assert!(u >= 10 * m, "memoized {m} vs unmemoized {u}");
    assert!(elapsed < 5.0, "took {elapsed:.2}s");
}
