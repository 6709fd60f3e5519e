use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::delta::{delta_partition_view, net_bound, DeltaRoute};
use crate::bits::{self, BitSet};
use crate::error::{Error, Result};
use crate::hypergraph::{BinaryView, Hypergraph, ProductBox};
use crate::measure::{self, Measure, ProductMeasure};
use crate::rational::{self, Rational};
use crate::vc::{self, SetFamily};

/// Largest point side on which the VC dimension is measured for the level
/// statistics.
const VC_MEASURE_LIMIT: usize = 4096;

/// One Δ-partition step of the recursion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRecord {
    /// Arity of the relation the step ran on.
    pub arity: usize,
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    pub classes: usize,
    pub net_size: usize,
    pub route: DeltaRoute,
    /// Measured VC dimension of the fibers `R_a`, when the search finished.
    pub d: Option<usize>,
    pub net_bound: Option<u128>,
}

/// A union of definable boxes approximating `R`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectApprox {
    pub boxes: Vec<ProductBox>,
    /// `D_i`: parameter tuples over `[k] \ {i}` in increasing coordinate
    /// order.
    pub params: Vec<Vec<Vec<u32>>>,
    #[serde(with = "rational::serde_str")]
    pub error: Rational,
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    /// `‖D‖ = max_i |D_i|`.
    pub param_norm: usize,
    pub levels: Vec<LevelRecord>,
}

impl RectApprox {
    /// Membership bitset of `A = ⋃ boxes` over the row-major product.
    pub fn membership(&self, h: &Hypergraph) -> BitSet {
        union_membership(h, &self.boxes)
    }
}

pub(crate) fn union_membership(h: &Hypergraph, boxes: &[ProductBox]) -> BitSet {
    let mut a = BitSet::with_capacity(h.tuple_count());
    for b in boxes {
        for t in b.tuples() {
            a.insert(h.linear_index(&t));
        }
    }
    a
}

pub fn rectangular_approximation(
    h: &Hypergraph,
    measures: &[Measure],
    eps: &Rational,
) -> Result<RectApprox> {
    if !rational::is_positive(eps) {
        return Err(Error::input("epsilon must be positive"));
    }
    let pm = ProductMeasure::for_hypergraph(h, measures)?;
    rect_with_measure(h, &pm, eps)
}

pub(crate) fn rect_with_measure(
    h: &Hypergraph,
    pm: &ProductMeasure,
    eps: &Rational,
) -> Result<RectApprox> {
    let mut levels = Vec::new();
    let (sides, params) = approximate(h, pm, eps, &mut levels)?;
    let mut boxes: Vec<ProductBox> = sides.iter().map(|s| ProductBox::from_bitsets(s)).collect();
    boxes.sort();
    boxes.dedup();
    let a = union_membership(h, &boxes);
    let error = pm.to_rational(measure::symmetric_difference_ticks(h, pm, &a));
    if error >= *eps {
        return Err(Error::internal(alloc::format!(
            "rectangular approximation error {} is not below ε = {}",
            rational::format(&error),
            rational::format(eps)
        )));
    }
    let params: Vec<Vec<Vec<u32>>> = params.into_iter().map(|p| p.into_iter().collect()).collect();
    let param_norm = params.iter().map(Vec::len).max().unwrap_or(0);
    Ok(RectApprox {
        boxes,
        params,
        error,
        epsilon: eps.clone(),
        param_norm,
        levels,
    })
}

type Sides = Vec<Vec<BitSet>>;

fn approximate(
    h: &Hypergraph,
    pm: &ProductMeasure,
    eps: &Rational,
    levels: &mut Vec<LevelRecord>,
) -> Result<(Sides, Vec<BTreeSet<Vec<u32>>>)> {
    let k = h.k();
    if k == 1 {
        let r = h.membership();
        let n = h.part_size(0);
        let mut params = BTreeSet::new();
        let mut sides = Vec::new();
        if r.count_ones(..) > 0 {
            sides.push(vec![r.clone()]);
            if r.count_ones(..) < n {
                params.insert(Vec::new());
            }
        }
        return Ok((sides, vec![params]));
    }
    let points: Vec<usize> = (0..k - 1).collect();
    let view = BinaryView::new(h, &points)?;
    let w = pm.view_weights(&view);
    let eps_delta = if k == 2 {
        eps.clone()
    } else {
        eps / rational::int(2)
    };
    let dp = delta_partition_view(&view, &w, &eps_delta)?;
    let d = if view.n_points() <= VC_MEASURE_LIMIT {
        let d = vc::vc_dimension_budgeted(&SetFamily::fibers(&view), vc::DEFAULT_VC_CAP, vc::VC_WORK_BUDGET);
        (!d.capped).then_some(d.value)
    } else {
        None
    };
    levels.push(LevelRecord {
        arity: k,
        epsilon: eps_delta.clone(),
        classes: dp.classes.len(),
        net_size: dp.net.len(),
        route: dp.route,
        d,
        net_bound: d.map(|d| net_bound(d.max(1), &eps_delta)),
    });

    let mut params = vec![BTreeSet::new(); k];
    for &a in &dp.net {
        params[k - 1].insert(view.point_tuple(a));
    }
    let sub_pm = pm.prefix(k - 1);
    let sub_eps = eps / rational::int(2);
    let mut sides = Vec::new();
    for (class, &rep) in dp.classes.iter().zip(&dp.representatives) {
        let sub = h.last_fiber_relation(rep as u32);
        let (sub_sides, sub_params) = approximate(&sub, &sub_pm, &sub_eps, levels)?;
        let x = bits::from_indices(h.part_size(k - 1), class.iter().copied());
        for mut s in sub_sides {
            s.push(x.clone());
            sides.push(s);
        }
        for (j, ps) in sub_params.into_iter().enumerate() {
            for mut c in ps {
                c.push(rep as u32);
                params[j].insert(c);
            }
        }
    }
    Ok((sides, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn half_graph_bipartite() {
        let h = Hypergraph::from_predicate(vec![4, 4], false, |t| t[0] <= t[1]).unwrap();
        let eps = frac(3, 10);
        let ra = rectangular_approximation(&h, &Measure::uniform_for(&h), &eps).unwrap();
        assert!(ra.error < eps);
        assert!(ra.param_norm >= 1);
    }

    #[test]
    fn staircase_three_partite() {
        let h = Hypergraph::from_predicate(vec![4, 4, 4], false, |t| t[0] + t[1] <= t[2]).unwrap();
        let eps = frac(1, 2);
        let ra = rectangular_approximation(&h, &Measure::uniform_for(&h), &eps).unwrap();
        assert!(ra.error < eps);
        // Parameters for part i live on the other two coordinates.
        for (i, ps) in ra.params.iter().enumerate() {
            for p in ps {
                assert_eq!(p.len(), 2, "part {i}");
            }
        }
    }

    #[test]
    fn empty_and_full_relations() {
        let empty = Hypergraph::new(vec![3, 3], Vec::<Vec<u32>>::new(), false).unwrap();
        let ra = rectangular_approximation(&empty, &Measure::uniform_for(&empty), &frac(1, 4))
            .unwrap();
        assert!(ra.boxes.is_empty());
        let full = Hypergraph::from_predicate(vec![3, 3], false, |_| true).unwrap();
        let ra = rectangular_approximation(&full, &Measure::uniform_for(&full), &frac(1, 4))
            .unwrap();
        assert_eq!(ra.boxes, vec![ProductBox::full(&[3, 3])]);
        assert_eq!(ra.error, rational::int(0));
    }
}
