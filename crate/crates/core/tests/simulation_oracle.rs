mod common;

use common::{naive_gfp, random_relations, t};
use moot_core::hierarchy::{greatest_fixed_point_of, CandidateSubsumption};
use moot_core::universe::{RelationLabel, TypeRelation};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn worklist_matches_naive_iteration(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.gen_range(1..=8);
        let rels = random_relations(&mut rng, n);
        let relations: Vec<TypeRelation> = rels
            .iter()
            .enumerate()
            .map(|(i, pairs)| {
                TypeRelation::from_pairs(
                    RelationLabel::FieldSelect(format!("f{i}")),
                    pairs.iter().map(|&(a, b, _)| (t(a), t(b))),
                    pairs.iter().filter(|p| p.2).map(|&(a, b, _)| (t(a), t(b))),
                )
            })
            .collect();
        let refs: Vec<&TypeRelation> = relations.iter().collect();
        let got = greatest_fixed_point_of(&refs, &CandidateSubsumption::full(n));
        let want = naive_gfp(n, &rels);
        for a in 0..n {
            for b in 0..n {
                prop_assert_eq!(got.contains(t(a), t(b)), want[a][b], "pair ({}, {})", a, b);
            }
        }
    }
}
