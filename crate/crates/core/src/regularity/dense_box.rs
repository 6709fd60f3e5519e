use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::partition::{
    cell_index, cell_of, cell_stats, regular_with_measure, PartitionOutcome,
};
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, ProductBox};
use crate::measure::{Measure, ProductMeasure};
use crate::rational::{self, Rational};

/// A box of a regular partition on which the relation is nearly complete.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DenseBox {
    pub cell: Vec<usize>,
    #[serde(rename = "box")]
    pub product_box: ProductBox,
    #[serde(with = "rational::serde_str")]
    pub density: Rational,
    #[serde(with = "rational::serde_str::vec")]
    pub side_masses: Vec<Rational>,
    /// `ε' = min(α, ε) / 4`, the regularity parameter used.
    #[serde(with = "rational::serde_str")]
    pub eps_prime: Rational,
    /// `δ = ε' / #boxes`; every side has measure above it.
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    pub box_count: usize,
    pub outcome: PartitionOutcome,
}

/// Finds a box `X_1 × … × X_k` with `μ(E ∩ X) > (1 - ε) μ(X)` and every side
/// heavier than `δ`, for a relation of density at least `α`.
pub fn find_dense_box(
    h: &Hypergraph,
    measures: &[Measure],
    alpha: &Rational,
    eps: &Rational,
) -> Result<DenseBox> {
    for (name, x) in [("alpha", alpha), ("epsilon", eps)] {
        if !rational::is_positive(x) || *x >= rational::one() {
            return Err(Error::input(alloc::format!("{} must lie in (0, 1)", name)));
        }
    }
    let pm = ProductMeasure::for_hypergraph(h, measures)?;
    let mass = pm.relation_mass(h);
    if mass < *alpha {
        return Err(Error::Precondition(alloc::format!(
            "relation has measure {} below alpha = {}",
            rational::format(&mass),
            rational::format(alpha)
        )));
    }
    let eps_prime = alpha.min(eps).clone() / rational::int(4);
    let outcome = regular_with_measure(h, &pm, &eps_prime)?;
    let p = &outcome.partition;
    let counts = p.class_counts();
    let box_count = p.box_count();
    let delta = &eps_prime / rational::int(box_count as i64);

    let assignment: Vec<Vec<usize>> = p
        .classes
        .iter()
        .enumerate()
        .map(|(i, cs)| {
            let mut a = vec![0; h.part_size(i)];
            for (c, class) in cs.iter().enumerate() {
                for &v in class {
                    a[v as usize] = c;
                }
            }
            a
        })
        .collect();
    let stats = cell_stats(h, &pm, &assignment, None);
    let sigma: Vec<usize> = p.sigma.iter().map(|c| cell_index(c, &counts)).collect();
    let mut best: Option<usize> = None;
    for l in p.labels.iter().filter(|l| l.label == 1) {
        let idx = cell_index(&l.cell, &counts);
        if sigma.contains(&idx) {
            continue;
        }
        let m = pm.to_rational(stats[idx].mass);
        if m <= delta {
            continue;
        }
        // Labels are in row-major order, so the first maximum is lex-least.
        if best.is_none_or(|b| stats[idx].mass > stats[b].mass) {
            best = Some(idx);
        }
    }
    let idx = best.ok_or_else(|| {
        Error::internal("no label-1 box above the mass threshold; regularity guarantee violated")
    })?;
    let cell = cell_of(idx, &counts);
    let product_box = ProductBox::new(
        cell.iter()
            .enumerate()
            .map(|(i, &c)| p.classes[i][c].clone())
            .collect(),
    );
    let s = &stats[idx];
    let density = rational::from_ticks(s.edge, s.mass);
    let side_masses: Vec<Rational> = product_box
        .sides
        .iter()
        .enumerate()
        .map(|(i, side)| {
            let t = pm.part(i);
            let ticks: u128 = side.iter().map(|&v| t.ticks[v as usize]).sum();
            rational::from_ticks(ticks, t.denom)
        })
        .collect();
    if density <= rational::one() - eps.clone() || side_masses.iter().any(|m| *m <= delta) {
        return Err(Error::internal("selected box does not meet the dense-box guarantee"));
    }
    Ok(DenseBox {
        cell,
        product_box,
        density,
        side_masses,
        eps_prime,
        delta,
        box_count,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn two_blocks_at_half_density() {
        let h = Hypergraph::from_predicate(vec![8, 8], false, |t| (t[0] < 4) == (t[1] < 4))
            .unwrap();
        let db = find_dense_box(&h, &Measure::uniform_for(&h), &frac(1, 2), &frac(1, 4)).unwrap();
        assert_eq!(db.density, rational::one());
        assert_eq!(db.side_masses, vec![frac(1, 2), frac(1, 2)]);
        assert_eq!(db.product_box.sides, vec![vec![0, 1, 2, 3], vec![0, 1, 2, 3]]);
    }

    #[test]
    fn sparse_relation_is_rejected() {
        let h = Hypergraph::new(vec![4, 4], vec![vec![0u32, 0]], false).unwrap();
        let err = find_dense_box(&h, &Measure::uniform_for(&h), &frac(1, 2), &frac(1, 4));
        assert!(matches!(err, Err(Error::Precondition(_))));
    }
}
