use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ladder::ladder_view;
use crate::bits::{self, BitSet};
use crate::error::{Error, Result};
use crate::hypergraph::{BinaryView, Hypergraph};
use crate::measure::{Measure, ProductMeasure, ViewWeights};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodnessReport {
    pub points: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    #[serde(with = "rational::serde_str")]
    pub mass: Rational,
    pub good: bool,
    /// A parameter whose fiber splits `A` with relative density in
    /// `[ε, 1 - ε]`, closest to 1/2.
    pub witness: Option<Vec<u32>>,
    #[serde(with = "rational::serde_str::option")]
    pub witness_density: Option<Rational>,
}

pub(crate) struct Goodness {
    pub good: bool,
    pub mass: u128,
    /// Parameter index and `μ(A ∩ R_b)`.
    pub witness: Option<(usize, u128)>,
}

/// Exhaustive scan over the parameters of `view`.
pub(crate) fn goodness(
    view: &BinaryView,
    w: &ViewWeights,
    set: &BitSet,
    eps: &Rational,
) -> Result<Goodness> {
    let mass = w.point_mass(set);
    if mass == 0 {
        return Err(Error::ZeroMeasure);
    }
    let mut best: Option<(usize, u128, u128)> = None;
    for b in 0..view.n_params() {
        let x = w.point_mass(&bits::intersection(set, view.fiber(b)));
        let low = rational::lt_scaled(x, eps, mass);
        let high = rational::lt_scaled(mass - x, eps, mass);
        if low || high {
            continue;
        }
        let off = (2 * x).abs_diff(mass);
        if best.is_none_or(|(_, _, o)| off < o) {
            best = Some((b, x, off));
        }
    }
    Ok(Goodness {
        good: best.is_none(),
        mass,
        witness: best.map(|(b, x, _)| (b, x)),
    })
}

pub fn good_check(
    h: &Hypergraph,
    measures: &[Measure],
    points: &[usize],
    a: &[Vec<u32>],
    eps: &Rational,
) -> Result<GoodnessReport> {
    let pm = ProductMeasure::for_hypergraph(h, measures)?;
    let view = BinaryView::new(h, points)?;
    let w = pm.view_weights(&view);
    let mut set = BitSet::with_capacity(view.n_points());
    for t in a {
        let coords = view.point_coords();
        let ok = t.len() == coords.len()
            && t.iter().zip(coords).all(|(&v, &c)| (v as usize) < h.part_size(c));
        if !ok {
            return Err(Error::input(format!("tuple {:?} is not a point of V_I", t)));
        }
        set.insert(view.point_index(t));
    }
    let g = goodness(&view, &w, &set, eps)?;
    Ok(GoodnessReport {
        points: view.point_coords().to_vec(),
        epsilon: eps.clone(),
        mass: rational::from_ticks(g.mass, w.point_denom),
        good: g.good,
        witness: g.witness.map(|(b, _)| view.param_tuple(b)),
        witness_density: g.witness.map(|(_, x)| rational::from_ticks(x, g.mass)),
    })
}

/// One split on the way down to a good piece.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentStep {
    pub witness: Vec<u32>,
    /// 1 when the piece continued inside `R_c`, 0 outside.
    pub branch: u8,
    #[serde(with = "rational::serde_str")]
    pub relative_density: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    pub path: Vec<DescentStep>,
    pub piece: Vec<u32>,
    #[serde(with = "rational::serde_str")]
    pub mass: Rational,
}

/// How the leftover of the extraction loop was absorbed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidueRoute {
    None,
    /// Added to the first piece, which stayed ε-good.
    Merged,
    /// Distributed to the nearest pieces by fiber distance.
    BestFit,
    /// Extraction continued until nothing was left.
    Extracted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescentPartition {
    pub part: usize,
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    /// Classes of `V_part` ordered by least vertex.
    pub classes: Vec<Vec<u32>>,
    pub extractions: Vec<Extraction>,
    pub residue: Vec<u32>,
    pub residue_route: ResidueRoute,
    pub max_depth: usize,
    pub d_hat: usize,
    /// `log((ε/2)^{d+1}) / log(1 - (ε/2)^d)` for `d = d_hat`.
    pub step_bound: f64,
    /// Whether `ε < 2^{-d_hat}`.
    pub precondition_met: bool,
}

pub(crate) fn step_bound(eps: &Rational, d: usize) -> f64 {
    let d = d.max(1) as f64;
    let h = rational::to_f64(eps) / 2.0;
    libm::log(libm::pow(h, d + 1.0)) / libm::log(1.0 - libm::pow(h, d))
}

pub(crate) fn below_pow2(eps: &Rational, d: usize) -> bool {
    *eps < rational::pow2_inv(d as u32)
}

pub(crate) struct Refined {
    pub pieces: Vec<BitSet>,
    pub extractions: Vec<(Vec<(usize, u8, u128, u128)>, usize)>,
    pub residue: BitSet,
    pub route: ResidueRoute,
    pub max_depth: usize,
}

/// Splits `start` into `ε/2`-good pieces (the first may absorb a small
/// residue and is then only `ε`-good).
pub(crate) fn refine_to_good(
    view: &BinaryView,
    w: &ViewWeights,
    start: &BitSet,
    eps: &Rational,
    depth_cap: usize,
) -> Result<Refined> {
    let half = eps / rational::int(2);
    let n = view.n_points();
    let positive = bits::from_indices(n, (0..n).filter(|&a| w.points[a] > 0));
    let mut rest = bits::intersection(start, &positive);
    let mut zero = start.clone();
    zero.difference_with(&positive);
    let mut out = Refined {
        pieces: Vec::new(),
        extractions: Vec::new(),
        residue: BitSet::with_capacity(n),
        route: ResidueRoute::None,
        max_depth: 0,
    };
    let mut extract_all = false;
    loop {
        let m = w.point_mass(&rest);
        if m == 0 {
            break;
        }
        if let Some(first) = out.pieces.first() {
            if !extract_all && rational::le_scaled(m, &half, w.point_mass(first)) {
                // Residue small enough to absorb.
                let mut merged = first.clone();
                merged.union_with(&rest);
                if goodness(view, w, &merged, eps)?.good {
                    out.pieces[0] = merged;
                    out.residue = rest.clone();
                    out.route = ResidueRoute::Merged;
                    rest.clear();
                    break;
                }
                if let Some(fitted) = best_fit(view, w, &out.pieces, &rest, eps)? {
                    out.pieces = fitted;
                    out.residue = rest.clone();
                    out.route = ResidueRoute::BestFit;
                    rest.clear();
                    break;
                }
                out.residue = rest.clone();
                out.route = ResidueRoute::Extracted;
                extract_all = true;
            }
        }
        let (piece, path) = descend(view, w, &rest, &half, depth_cap)?;
        out.max_depth = out.max_depth.max(path.len());
        rest.difference_with(&piece);
        out.extractions.push((path, out.pieces.len()));
        out.pieces.push(piece);
    }
    if out.pieces.is_empty() {
        out.pieces.push(start.clone());
    } else {
        out.pieces[0].union_with(&zero);
    }
    Ok(out)
}

/// Follows non-goodness witnesses down to a good piece. Each path entry is
/// `(witness, branch, μ(A ∩ R_c), μ(A))`.
#[allow(clippy::type_complexity)]
fn descend(
    view: &BinaryView,
    w: &ViewWeights,
    start: &BitSet,
    eps: &Rational,
    depth_cap: usize,
) -> Result<(BitSet, Vec<(usize, u8, u128, u128)>)> {
    let mut cur = start.clone();
    let mut path = Vec::new();
    loop {
        let g = goodness(view, w, &cur, eps)?;
        let Some((c, x)) = g.witness else {
            return Ok((cur, path));
        };
        if path.len() >= depth_cap {
            let evidence: Vec<_> = path
                .iter()
                .map(|&(b, br, _, _): &(usize, u8, u128, u128)| (view.param_tuple(b), br))
                .collect();
            return Err(Error::DepthCap {
                cap: depth_cap,
                evidence: format!("descent witnesses (parameter, branch): {:?}", evidence),
            });
        }
        let inside = bits::intersection(&cur, view.fiber(c));
        let mut outside = cur.clone();
        outside.difference_with(view.fiber(c));
        let m1 = x;
        let m0 = g.mass - x;
        let good1 = goodness(view, w, &inside, eps)?.good;
        let good0 = goodness(view, w, &outside, eps)?.good;
        let take_inside = match (good1, good0) {
            (true, false) => true,
            (false, true) => false,
            _ => m1 >= m0,
        };
        path.push((c, u8::from(take_inside), x, g.mass));
        cur = if take_inside { inside } else { outside };
    }
}

/// Assigns every residue point to the piece whose least point has the
/// nearest cofiber; `None` if some receiving piece stops being ε-good.
fn best_fit(
    view: &BinaryView,
    w: &ViewWeights,
    pieces: &[BitSet],
    residue: &BitSet,
    eps: &Rational,
) -> Result<Option<Vec<BitSet>>> {
    let reps: Vec<usize> = pieces
        .iter()
        .map(|p| p.ones().next().expect("pieces are nonempty"))
        .collect();
    let mut out = pieces.to_vec();
    let mut touched = alloc::vec![false; pieces.len()];
    for a in residue.ones() {
        let mut best = (u128::MAX, 0);
        for (i, &r) in reps.iter().enumerate() {
            let d = w.param_mass(&bits::symmetric_difference(view.cofiber(a), view.cofiber(r)));
            if d < best.0 {
                best = (d, i);
            }
        }
        out[best.1].insert(a);
        touched[best.1] = true;
    }
    for (i, p) in out.iter().enumerate() {
        if touched[i] && !goodness(view, w, p, eps)?.good {
            return Ok(None);
        }
    }
    Ok(Some(out))
}

pub(crate) fn describe_extractions(
    view: &BinaryView,
    w: &ViewWeights,
    refined: &Refined,
) -> Vec<Extraction> {
    refined
        .extractions
        .iter()
        .map(|(path, idx)| {
            // The first piece may have absorbed the residue since; report
            // the piece as extracted.
            let mut piece = refined.pieces[*idx].clone();
            if *idx == 0 {
                piece.difference_with(&refined.residue);
            }
            Extraction {
                path: path
                    .iter()
                    .map(|&(c, branch, x, m)| DescentStep {
                        witness: view.param_tuple(c),
                        branch,
                        relative_density: rational::from_ticks(x, m),
                    })
                    .collect(),
                piece: piece.ones().map(|v| v as u32).collect(),
                mass: rational::from_ticks(w.point_mass(&piece), w.point_denom),
            }
        })
        .collect()
}

pub(crate) fn sorted_classes(pieces: &[BitSet]) -> Vec<Vec<u32>> {
    let mut classes: Vec<Vec<u32>> = pieces
        .iter()
        .map(|p| p.ones().map(|v| v as u32).collect())
        .filter(|c: &Vec<u32>| !c.is_empty())
        .collect();
    classes.sort();
    classes
}

/// Partition of part `part` into good pieces by repeated witness descent.
pub fn good_descent_partition(
    h: &Hypergraph,
    measures: &[Measure],
    part: usize,
    eps: &Rational,
    depth_cap: usize,
    d_hat: Option<usize>,
) -> Result<DescentPartition> {
    if !rational::is_positive(eps) || *eps >= rational::one() {
        return Err(Error::input("epsilon must lie in (0, 1)"));
    }
    if part >= h.k() {
        return Err(Error::input(format!("part {} out of range", part)));
    }
    let pm = ProductMeasure::for_hypergraph(h, measures)?;
    let view = BinaryView::new(h, &[part])?;
    let w = pm.view_weights(&view);
    let d_hat = match d_hat {
        Some(d) => d,
        None => ladder_view(&view, depth_cap.max(1)).length,
    };
    let refined = refine_to_good(&view, &w, &bits::full(view.n_points()), eps, depth_cap)?;
    Ok(DescentPartition {
        part,
        epsilon: eps.clone(),
        classes: sorted_classes(&refined.pieces),
        extractions: describe_extractions(&view, &w, &refined),
        residue: refined.residue.ones().map(|v| v as u32).collect(),
        residue_route: refined.route,
        max_depth: refined.max_depth,
        d_hat,
        step_bound: step_bound(eps, d_hat),
        precondition_met: below_pow2(eps, d_hat),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use alloc::vec;

    fn blocks(n: usize, size: usize) -> Hypergraph {
        Hypergraph::from_predicate(vec![n, n], false, move |t| {
            t[0] as usize / size == t[1] as usize / size
        })
        .unwrap()
    }

    #[test]
    fn half_graph_middle_witness() {
        let h = Hypergraph::from_predicate(vec![10, 10], false, |t| t[0] <= t[1]).unwrap();
        let all: Vec<Vec<u32>> = (0..10).map(|v| vec![v]).collect();
        let r = good_check(&h, &Measure::uniform_for(&h), &[0], &all, &frac(1, 5)).unwrap();
        assert!(!r.good);
        assert_eq!(r.witness, Some(vec![4]));
        assert_eq!(r.witness_density, Some(frac(1, 2)));
    }

    #[test]
    fn complete_and_empty_are_good() {
        let full = Hypergraph::from_predicate(vec![3, 3], false, |_| true).unwrap();
        let a = vec![vec![0u32], vec![2]];
        assert!(good_check(&full, &Measure::uniform_for(&full), &[0], &a, &frac(1, 3)).unwrap().good);
        let empty = Hypergraph::new(vec![3, 3], Vec::<Vec<u32>>::new(), false).unwrap();
        assert!(good_check(&empty, &Measure::uniform_for(&empty), &[0], &a, &frac(1, 3)).unwrap().good);
    }

    #[test]
    fn zero_measure_set_is_an_error() {
        let h = blocks(4, 2);
        let ms = vec![
            Measure::new(0, vec![frac(1, 2), frac(1, 2), rational::int(0), rational::int(0)])
                .unwrap(),
            Measure::uniform(1, 4),
        ];
        let r = good_check(&h, &ms, &[0], &[vec![3]], &frac(1, 4));
        assert!(matches!(r, Err(Error::ZeroMeasure)));
    }

    #[test]
    fn three_blocks_are_recovered() {
        let h = blocks(12, 4);
        let dp = good_descent_partition(&h, &Measure::uniform_for(&h), 0, &frac(1, 8), 8, None)
            .unwrap();
        assert_eq!(
            dp.classes,
            vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7], vec![8, 9, 10, 11]]
        );
        assert_eq!(dp.d_hat, 1);
        assert!(dp.max_depth <= 2);
    }

    #[test]
    fn half_graph_descent_terminates_good() {
        let h = Hypergraph::from_predicate(vec![8, 8], false, |t| t[0] <= t[1]).unwrap();
        let ms = Measure::uniform_for(&h);
        let eps = frac(1, 4);
        let dp = good_descent_partition(&h, &ms, 0, &eps, 8, None).unwrap();
        for c in &dp.classes {
            let a: Vec<Vec<u32>> = c.iter().map(|&v| vec![v]).collect();
            assert!(good_check(&h, &ms, &[0], &a, &eps).unwrap().good);
        }
    }

    #[test]
    fn depth_cap_is_enforced() {
        let h = Hypergraph::from_predicate(vec![16, 16], false, |t| t[0] <= t[1]).unwrap();
        let r = good_descent_partition(&h, &Measure::uniform_for(&h), 0, &frac(1, 8), 1, Some(1));
        assert!(matches!(r, Err(Error::DepthCap { cap: 1, .. })));
    }
}
