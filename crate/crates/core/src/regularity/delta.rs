use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::bits::{self, BitSet};
use crate::error::{Error, Result};
use crate::hypergraph::{BinaryView, Hypergraph};
use crate::measure::{Measure, ProductMeasure, TickWeights, ViewWeights};
use crate::rational::{self, Rational};
use crate::vc::{self, SetFamily};

/// Upper limit on the number of distinct-fiber pairs for which the
/// symmetric-difference family is materialised; beyond it the partition falls
/// back to atoms over the whole point side.
const PAIR_BUDGET: usize = 1 << 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaRoute {
    /// ε > 1: every pair of fibers is trivially close.
    Trivial,
    /// Atoms over an ε/2-net of the symmetric-difference family.
    Net,
    /// Atoms over the whole point side (parameters with identical fibers).
    FullSide,
}

/// Partition of the parameters `V_{I°}` into classes of pairwise close fibers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaPartition {
    pub point_coords: Vec<usize>,
    pub param_coords: Vec<usize>,
    /// Parameter indices (row-major over `V_{I°}`), classes ordered by their
    /// least element.
    pub classes: Vec<Vec<usize>>,
    /// Least element of each class.
    pub representatives: Vec<usize>,
    /// The defining parameter set `D ⊆ V_I` as point indices.
    pub net: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    pub route: DeltaRoute,
    /// Largest `μ(R_a Δ R_a')` inside a class.
    #[serde(with = "rational::serde_str")]
    pub max_class_distance: Rational,
}

impl DeltaPartition {
    /// Class index of every parameter.
    pub fn assignment(&self, n_params: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n_params];
        for (i, class) in self.classes.iter().enumerate() {
            for &b in class {
                out[b] = i;
            }
        }
        out
    }
}

pub fn delta_approx_partition(
    h: &Hypergraph,
    measures: &[Measure],
    eps: &Rational,
    points: &[usize],
) -> Result<DeltaPartition> {
    let pm = ProductMeasure::for_hypergraph(h, measures)?;
    let view = BinaryView::new(h, points)?;
    let w = pm.view_weights(&view);
    delta_partition_view(&view, &w, eps)
}

pub fn delta_partition_view(
    view: &BinaryView,
    w: &ViewWeights,
    eps: &Rational,
) -> Result<DeltaPartition> {
    if !rational::is_positive(eps) {
        return Err(Error::input("epsilon must be positive"));
    }
    let n_params = view.n_params();
    let mut out = DeltaPartition {
        point_coords: view.point_coords().to_vec(),
        param_coords: view.param_coords().to_vec(),
        classes: Vec::new(),
        representatives: Vec::new(),
        net: Vec::new(),
        epsilon: eps.clone(),
        route: DeltaRoute::Net,
        max_class_distance: rational::int(0),
    };
    if n_params == 0 {
        return Ok(out);
    }
    if *eps > rational::one() {
        out.route = DeltaRoute::Trivial;
        out.classes = vec![(0..n_params).collect()];
    } else {
        // Parameters with identical fibers always share a class; work on the
        // distinct fibers only.
        let mut by_fiber: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut distinct: Vec<&BitSet> = Vec::new();
        for b in 0..n_params {
            by_fiber.entry(bits::key(view.fiber(b))).or_insert_with(|| {
                distinct.push(view.fiber(b));
                distinct.len() - 1
            });
        }
        let m = distinct.len();
        let net = if m * m.saturating_sub(1) / 2 <= PAIR_BUDGET {
            let half = eps / rational::int(2);
            let mut heavy = Vec::new();
            for i in 0..m {
                for j in i + 1..m {
                    let diff = bits::symmetric_difference(distinct[i], distinct[j]);
                    if !rational::lt_scaled(w.point_mass(&diff), &half, w.point_denom) {
                        heavy.push(diff);
                    }
                }
            }
            let family = SetFamily::from_bitsets(view.n_points(), heavy);
            let ticks = TickWeights {
                ticks: w.points.clone(),
                denom: w.point_denom,
            };
            let mut net = vc::greedy_net(&family, &ticks, &half);
            net.sort_unstable();
            Some(net)
        } else {
            None
        };
        match net {
            Some(net) if net.len() <= view.n_points() => {
                out.net = net;
            }
            _ => {
                out.route = DeltaRoute::FullSide;
                out.net = (0..view.n_points()).collect();
            }
        }
        let mut classes: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
        for b in 0..n_params {
            let pattern: Vec<bool> = out.net.iter().map(|&a| view.related(a, b)).collect();
            classes.entry(pattern).or_default().push(b);
        }
        out.classes = classes.into_values().collect();
        out.classes.sort();
    }
    out.representatives = out.classes.iter().map(|c| c[0]).collect();
    out.max_class_distance = max_class_distance(view, w, &out.classes);
    if out.max_class_distance >= *eps {
        return Err(Error::internal(alloc::format!(
            "Δ-partition class distance {} is not below ε = {}",
            rational::format(&out.max_class_distance),
            rational::format(eps)
        )));
    }
    Ok(out)
}

fn max_class_distance(view: &BinaryView, w: &ViewWeights, classes: &[Vec<usize>]) -> Rational {
    let mut best = 0u128;
    for class in classes {
        let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for &b in class {
            seen.entry(bits::key(view.fiber(b))).or_insert(b);
        }
        let reps: Vec<usize> = seen.into_values().collect();
        for (i, &a) in reps.iter().enumerate() {
            for &b in &reps[i + 1..] {
                let diff = bits::symmetric_difference(view.fiber(a), view.fiber(b));
                best = best.max(w.point_mass(&diff));
            }
        }
    }
    rational::from_ticks(best, w.point_denom)
}

/// `⌈320 d (1/ε)²⌉`, the parameter-set bound for the VC route.
pub(crate) fn net_bound(d: usize, eps: &Rational) -> u128 {
    let num = BigInt::from(320u32 * d as u32) * eps.denom() * eps.denom();
    let den = eps.numer() * eps.numer();
    let (q, r) = num.div_rem(&den);
    let q = if r == BigInt::from(0) { q } else { q + 1 };
    q.to_u128().unwrap_or(u128::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn half_graph(n: usize) -> Hypergraph {
        Hypergraph::from_predicate(vec![n, n], false, |t| t[0] <= t[1]).unwrap()
    }

    #[test]
    fn complete_bipartite_is_one_class() {
        let h = Hypergraph::from_predicate(vec![3, 4], false, |_| true).unwrap();
        let dp = delta_approx_partition(&h, &Measure::uniform_for(&h), &frac(1, 10), &[0]).unwrap();
        assert_eq!(dp.classes, vec![vec![0, 1, 2, 3]]);
        assert!(dp.net.is_empty());
    }

    #[test]
    fn half_graph_classes_are_close() {
        let h = half_graph(4);
        let ms = Measure::uniform_for(&h);
        let eps = frac(3, 10);
        let dp = delta_approx_partition(&h, &ms, &eps, &[0]).unwrap();
        assert!(dp.max_class_distance < eps);
        // Exhaustive pairwise table: fibers of b_j are {0..=j}, so
        // μ(R_i Δ R_j) = |i - j| / 4; classes must avoid distance ≥ 3/10.
        for class in &dp.classes {
            for &a in class {
                for &b in class {
                    assert!((a as i64 - b as i64).abs() <= 1);
                }
            }
        }
        let total: usize = dp.classes.iter().map(|c| c.len()).sum();
        assert_eq!(total, 4);
    }

    #[test]
    fn large_epsilon_is_a_single_class() {
        let h = half_graph(5);
        let dp = delta_approx_partition(&h, &Measure::uniform_for(&h), &rational::int(2), &[0])
            .unwrap();
        assert_eq!(dp.classes.len(), 1);
        assert_eq!(dp.route, DeltaRoute::Trivial);
    }

    #[test]
    fn net_bound_formula() {
        assert_eq!(net_bound(1, &frac(1, 2)), 1280);
        assert_eq!(net_bound(2, &frac(3, 10)), 7112);
    }
}
