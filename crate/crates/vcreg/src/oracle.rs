//! Brute-force recomputations used to double-check the fast kernels.
//!
//! Each function enumerates the objects directly from the definition and
//! shares no code path with the corresponding kernel.

use vcreg_core::counterexamples::{DyadicBall, Parity};
use vcreg_core::hypergraph::Tuples;
use vcreg_core::rational::{self, Rational};
use vcreg_core::{Hypergraph, Measure, ProductBox};

fn tuple_weight(measures: &[Measure], t: &[u32]) -> Rational {
    t.iter()
        .zip(measures)
        .map(|(&v, m)| m.weight(v as usize).clone())
        .product()
}

/// `μ(R Δ ⋃ boxes)` by visiting every tuple of the product.
pub fn symmetric_difference_mass(h: &Hypergraph, measures: &[Measure], boxes: &[ProductBox]) -> Rational {
    let mut total = rational::int(0);
    for t in Tuples::new(h.part_sizes()) {
        let in_union = boxes.iter().any(|b| {
            b.sides
                .iter()
                .zip(&t)
                .all(|(side, v)| side.contains(v))
        });
        if in_union != h.contains(&t) {
            total += tuple_weight(measures, &t);
        }
    }
    total
}

/// `μ(R ∩ X) / μ(X)` by visiting every tuple of the box.
pub fn box_density(h: &Hypergraph, measures: &[Measure], b: &ProductBox) -> Option<Rational> {
    let mut mass = rational::int(0);
    let mut edge = rational::int(0);
    for t in b.tuples() {
        let w = tuple_weight(measures, &t);
        if h.contains(&t) {
            edge += w.clone();
        }
        mass += w;
    }
    (mass != rational::int(0)).then(|| edge / mass)
}

/// `(ordered distinct pairs, edge pairs)` over the leaves of a ball union.
pub fn dyadic_pairs(balls: &[DyadicBall], depth: usize, parity: Parity) -> (u128, u128) {
    let leaves: Vec<u64> = balls
        .iter()
        .flat_map(|b| {
            let first = b.first_leaf(depth);
            first..first + b.leaf_count(depth) as u64
        })
        .collect();
    let mut pairs = 0u128;
    let mut edges = 0u128;
    for &x in &leaves {
        for &y in &leaves {
            if x == y {
                continue;
            }
            pairs += 1;
            let v = (0..depth)
                .take_while(|&i| (x >> (depth - 1 - i)) & 1 == (y >> (depth - 1 - i)) & 1)
                .count();
            if parity.is_edge(v) {
                edges += 1;
            }
        }
    }
    (pairs, edges)
}

/// `(edges, triples)` of the convexity relation over all increasing triples.
pub fn convexity_triples(c: &[i64]) -> (u128, u128) {
    let n = c.len();
    let mut edges = 0u128;
    let mut triples = 0u128;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                triples += 1;
                if c[i] + c[k] - 2 * c[j] >= 0 {
                    edges += 1;
                }
            }
        }
    }
    (edges, triples)
}
