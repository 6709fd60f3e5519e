mod common;

use common::*;
use proptest::prelude::*;
use vcreg_core::counterexamples::{
    anti_homogeneity_bound_check, random_ball_union, reflection_involution_check, Parity,
};
use vcreg_core::instances::{generate, GeneratorKind, GeneratorSpec};
use vcreg_core::measure::ProductMeasure;
use vcreg_core::rational::{self, frac, Rational};
use vcreg_core::regularity::{regular_partition, verify_regular_partition};
use vcreg_core::stable::{
    good_check, good_descent_partition, ladder_index, stable_regular_partition, verify_ladder,
    ResidueRoute, StableOptions,
};
use vcreg_core::vc::{
    atoms_over, epsilon_net, sauer_check, vc_dimension, verify_net, NetStrategy, SetFamily,
};
use vcreg_core::{BinaryView, Hypergraph, Measure};

fn relation(max_k: usize, max_n: usize) -> impl Strategy<Value = Hypergraph> {
    (2..=max_k)
        .prop_flat_map(move |k| proptest::collection::vec(1..=max_n, k))
        .prop_flat_map(|sizes| {
            let total: usize = sizes.iter().product();
            (Just(sizes), proptest::collection::vec(any::<bool>(), total))
        })
        .prop_map(|(sizes, bits)| {
            let edges: Vec<Vec<u32>> = tuples(&sizes)
                .into_iter()
                .zip(bits)
                .filter(|(_, b)| *b)
                .map(|(t, _)| t)
                .collect();
            Hypergraph::new(sizes, edges, false).unwrap()
        })
}

fn epsilon() -> impl Strategy<Value = Rational> {
    prop_oneof![Just(frac(1, 2)), Just(frac(1, 3)), Just(frac(1, 4)), Just(frac(1, 8))]
}

fn family(ground: usize, max_sets: usize) -> impl Strategy<Value = Vec<Vec<usize>>> {
    proptest::collection::vec(proptest::collection::btree_set(0..ground, 0..=ground), 0..=max_sets)
        .prop_map(|sets| sets.into_iter().map(|s| s.into_iter().collect()).collect())
}

fn block_union(n: usize, blocks: usize, seed: u64) -> Hypergraph {
    let mut spec = GeneratorSpec::new(GeneratorKind::BlockUnion, n, seed);
    spec.blocks = Some(blocks);
    spec.shuffle = true;
    generate(&spec).unwrap().hypergraph
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn vc_is_monotone(sets in family(7, 24), keep in proptest::collection::vec(any::<bool>(), 24)) {
        let sub: Vec<Vec<usize>> = sets
            .iter()
            .zip(&keep)
            .filter(|(_, k)| **k)
            .map(|(s, _)| s.clone())
            .collect();
        let big = vc_dimension(&SetFamily::new(7, sets).unwrap(), 8);
        let small = vc_dimension(&SetFamily::new(7, sub).unwrap(), 8);
        prop_assert!(small.value <= big.value);
    }

    #[test]
    fn nets_cover_heavy_members(sets in family(9, 20), seed in 0u64..1000, eps in epsilon()) {
        let f = SetFamily::new(9, sets.clone()).unwrap();
        let m = random_measure(0, 9, seed);
        for strategy in [NetStrategy::Greedy, NetStrategy::Random] {
            let net = epsilon_net(&f, &m, &eps, strategy, seed).unwrap();
            prop_assert!(net.verified);
            prop_assert!(verify_net(&f, &m.ticks().unwrap(), &eps, &net.points));
            for s in &sets {
                if m.mass(s.iter().copied()) >= eps {
                    prop_assert!(s.iter().any(|x| net.points.contains(x)));
                }
            }
        }
    }

    #[test]
    fn sauer_holds_on_random_families(sets in family(8, 30), n in 1usize..=8) {
        let f = SetFamily::new(8, sets).unwrap();
        let d = vc_dimension(&f, 8).value;
        let n = n.max(d);
        prop_assert!(sauer_check(&f, d, n).unwrap().holds);
        if d > 0 {
            prop_assert!(sauer_check(&f, d, d - 1).is_err());
        }
    }

    #[test]
    fn atoms_match_boolean_combinations(h in relation(2, 6), pick in proptest::collection::vec(0usize..6, 0..=4)) {
        let view = BinaryView::new(&h, &[0]).unwrap();
        let mut params: Vec<usize> = pick.into_iter().filter(|&b| b < view.n_params()).collect();
        params.sort_unstable();
        params.dedup();
        let atoms = atoms_over(&view, &params).len();
        // Every Boolean function of the membership pattern defines a set;
        // the distinct sets number 2^atoms.
        let patterns = 1usize << params.len();
        let mut sets = std::collections::BTreeSet::new();
        for f in 0u64..1 << patterns {
            let set: Vec<usize> = (0..view.n_points())
                .filter(|&a| {
                    let p = params
                        .iter()
                        .enumerate()
                        .fold(0, |acc, (j, &b)| acc | (view.related(a, b) as usize) << j);
                    f >> p & 1 == 1
                })
                .collect();
            sets.insert(set);
        }
        prop_assert_eq!(sets.len(), 1usize << atoms);
    }

    #[test]
    fn regular_partitions_verify(h in relation(3, 5), eps in epsilon(), seed in 0u64..100) {
        let ms = random_measures(&h, seed);
        let out = regular_partition(&h, &ms, &eps).unwrap();
        prop_assert!(out.report.passed(), "{:?}", out.report.violations);
        prop_assert!(out.report.sigma_mass <= eps);
        let again = verify_regular_partition(&h, &ms, &out.partition).unwrap();
        prop_assert_eq!(&again, &out.report);
        let pm = ProductMeasure::for_hypergraph(&h, &ms).unwrap();
        let union = out.rect.membership(&h);
        let brute = mass_where(&h, &ms, |t| h.contains(t) != union.contains(h.linear_index(t)));
        prop_assert_eq!(&brute, &out.rect.error);
        prop_assert!(pm.relation_mass(&h) <= rational::one());
    }

    #[test]
    fn ladder_certificates_verify(h in relation(2, 7)) {
        let l = ladder_index(&h, &[0], 8).unwrap();
        prop_assert_eq!(l.certificate.a.len(), l.length);
        prop_assert!(verify_ladder(&h, &l.certificate).unwrap());
        let a = &l.certificate.a;
        let b = &l.certificate.b;
        for i in 0..a.len() {
            for j in 0..b.len() {
                prop_assert_eq!(h.contains(&[a[i][0], b[j][0]]), i <= j);
            }
        }
    }

    #[test]
    fn descent_classes_are_good(n in 4usize..=16, blocks in 1usize..=4, seed in 0u64..50, half in any::<bool>()) {
        let h = if half {
            let mut spec = GeneratorSpec::new(GeneratorKind::HalfGraph, n.min(8), seed);
            spec.shuffle = true;
            generate(&spec).unwrap().hypergraph
        } else {
            block_union(n, blocks.min(n), seed)
        };
        let ms = Measure::uniform_for(&h);
        let eps = frac(1, 4);
        let ladder = ladder_index(&h, &[0], 16).unwrap();
        let d = good_descent_partition(&h, &ms, 0, &eps, 16, None).unwrap();
        prop_assert!(d.max_depth <= ladder.length + 1);
        for class in &d.classes {
            let merged = d.residue_route == ResidueRoute::Merged
                && d.residue.first().is_some_and(|v| class.contains(v));
            let target = if merged { eps.clone() } else { eps.clone() / rational::int(2) };
            let a: Vec<Vec<u32>> = class.iter().map(|&v| vec![v]).collect();
            prop_assert!(good_check(&h, &ms, &[0], &a, &target).unwrap().good);
        }
    }

    #[test]
    fn stable_partitions_on_blocks(n in 8usize..=24, blocks in 1usize..=4, seed in 0u64..50) {
        let h = block_union(n, blocks, seed);
        let ms = Measure::uniform_for(&h);
        let eps = frac(1, 8);
        let out = stable_regular_partition(&h, &ms, &eps, &StableOptions::default()).unwrap();
        prop_assert!(out.partition.sigma.is_empty());
        prop_assert!(out.report.passed());
        prop_assert!(verify_regular_partition(&h, &ms, &out.partition).unwrap().passed());
        for c in out.partition.class_counts() {
            prop_assert!(c <= blocks + 1);
        }
        for l in &out.partition.labels {
            let sides: Vec<Vec<u32>> =
                l.cell.iter().enumerate().map(|(i, &c)| out.partition.classes[i][c].clone()).collect();
            let (e, m) = box_edge_mass(&h, &ms, &sides);
            prop_assert_eq!(e, if l.label == 1 { m } else { frac(0, 1) });
        }
    }

    #[test]
    fn anti_homogeneity_holds(depth in 1usize..=10, seed in any::<u64>(), parity in any::<bool>()) {
        let parity = if parity { Parity::Odd } else { Parity::Even };
        let (a, b) = random_ball_union(depth, seed, 10).unwrap();
        let leaves: u128 = a.iter().map(|x| x.leaf_count(depth)).sum();
        prop_assume!(leaves >= 2);
        prop_assert!(anti_homogeneity_bound_check(&a, &b, depth, parity).unwrap().verdict);
    }

    #[test]
    fn reflection_on_intervals(lo in 1i64..=198, len in 2i64..=200) {
        let hi = (lo + len).min(200);
        prop_assume!(hi - lo >= 2);
        let c: Vec<i64> = (lo..=hi).collect();
        prop_assert!(reflection_involution_check(&c).unwrap().holds);
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>(), n in 4usize..=12, kind in 0usize..5) {
        let kinds = [
            GeneratorKind::IntervalGraph,
            GeneratorKind::HalfGraph,
            GeneratorKind::BlockUnion,
            GeneratorKind::Staircase,
            GeneratorKind::RandomVcCapped,
        ];
        let mut spec = GeneratorSpec::new(kinds[kind], n, seed);
        spec.shuffle = true;
        spec.cap = Some(4);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        prop_assert_eq!(a.hypergraph, b.hypergraph);
        prop_assert_eq!(a.measured, b.measured);
    }
}

#[test]
fn random_nets_on_intervals_first_try() {
    let sets: Vec<Vec<usize>> = (0..20)
        .flat_map(|a| (a..20).map(move |b| (a..=b).collect()))
        .collect();
    let f = SetFamily::new(20, sets).unwrap();
    let m = Measure::uniform(0, 20);
    let first_try = (0..100)
        .filter(|&seed| {
            let net = epsilon_net(&f, &m, &frac(1, 4), NetStrategy::Random, seed).unwrap();
            net.used == NetStrategy::Random && net.attempts == 1
        })
        .count();
    assert!(first_try >= 90, "{} of 100", first_try);
}
