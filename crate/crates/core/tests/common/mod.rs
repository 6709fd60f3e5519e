//! Brute-force oracles shared by the integration tests. They only use the
//! public `contains`/`weight` accessors and plain rational arithmetic.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vcreg_core::rational::{self, Rational};
use vcreg_core::{Hypergraph, Measure};

pub fn tuples(sizes: &[usize]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n as u32).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn random_relation(sizes: &[usize], percent: u32, seed: u64) -> Hypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<Vec<u32>> = tuples(sizes)
        .into_iter()
        .filter(|_| rng.gen_range(0..100) < percent)
        .collect();
    Hypergraph::new(sizes.to_vec(), edges, false).unwrap()
}

/// Positive random weights `w_v / Σ w`.
pub fn random_measure(part: usize, n: usize, seed: u64) -> Measure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=5)).collect();
    let total: i64 = raw.iter().sum();
    Measure::new(part, raw.iter().map(|&w| rational::frac(w, total)).collect()).unwrap()
}

pub fn random_measures(h: &Hypergraph, seed: u64) -> Vec<Measure> {
    (0..h.k())
        .map(|i| random_measure(i, h.part_size(i), seed.wrapping_add(i as u64 * 7919)))
        .collect()
}

pub fn tuple_weight(measures: &[Measure], t: &[u32]) -> Rational {
    t.iter()
        .zip(measures)
        .fold(rational::one(), |acc, (&v, m)| acc * m.weight(v as usize))
}

pub fn mass_where(h: &Hypergraph, measures: &[Measure], keep: impl Fn(&[u32]) -> bool) -> Rational {
    tuples(h.part_sizes())
        .iter()
        .filter(|t| keep(t))
        .map(|t| tuple_weight(measures, t))
        .sum()
}

pub fn in_box(sides: &[Vec<u32>], t: &[u32]) -> bool {
    sides.iter().zip(t).all(|(s, v)| s.contains(v))
}

pub fn side_mass(m: &Measure, side: &[u32]) -> Rational {
    side.iter().map(|&v| m.weight(v as usize).clone()).sum()
}

/// `μ(E ∩ Y)` and `μ(Y)` for a box `Y`.
pub fn box_edge_mass(h: &Hypergraph, measures: &[Measure], sides: &[Vec<u32>]) -> (Rational, Rational) {
    let total: Rational = sides
        .iter()
        .zip(measures)
        .map(|(s, m)| side_mass(m, s))
        .product();
    let edge = mass_where(h, measures, |t| in_box(sides, t) && h.contains(t));
    (edge, total)
}

/// Every subset of `s`, including the empty one.
pub fn subsets(s: &[u32]) -> Vec<Vec<u32>> {
    (0u32..1 << s.len())
        .map(|mask| {
            s.iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

/// VC dimension by trying every subset of the ground set.
pub fn brute_vc(ground: usize, sets: &[Vec<usize>]) -> usize {
    let mut best = 0;
    for mask in 0u32..1 << ground {
        let sub: Vec<usize> = (0..ground).filter(|&i| mask >> i & 1 == 1).collect();
        if sub.len() <= best {
            continue;
        }
        let traces: std::collections::BTreeSet<Vec<bool>> = sets
            .iter()
            .map(|s| sub.iter().map(|x| s.contains(x)).collect())
            .collect();
        if traces.len() == 1 << sub.len() {
            best = sub.len();
        }
    }
    best
}
