use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::good::{
    below_pow2, describe_extractions, goodness, refine_to_good, sorted_classes, step_bound,
    DescentPartition,
};
use super::ladder::{ladder_view, LadderResult};
use crate::bits::{self, BitSet};
use crate::error::{Error, Result};
use crate::hypergraph::{BinaryView, Hypergraph, ProductBox, Tuples};
use crate::measure::{Measure, ProductMeasure, ViewWeights};
use crate::rational::{self, Rational};
use crate::regularity::{cell_stats, BoxLabel, RegularPartition, VerificationReport};

/// Safety bound on class splits per part and round.
const SPLIT_LIMIT: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableOptions {
    pub depth_cap: usize,
    /// Cross-refinement rounds; `None` means `2k`.
    pub rounds: Option<usize>,
    /// Stability parameter; `None` measures it with the ladder search.
    pub d_hat: Option<usize>,
}

impl Default for StableOptions {
    fn default() -> Self {
        StableOptions {
            depth_cap: 8,
            rounds: None,
            d_hat: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StableOutcome {
    pub partition: RegularPartition,
    pub report: VerificationReport,
    /// Initial descent partition of every part.
    pub descents: Vec<DescentPartition>,
    /// Ladder measurements per part (absent when `d_hat` was given).
    pub ladders: Vec<Option<LadderResult>>,
    pub d_hat: usize,
    pub precondition_met: bool,
    /// The goodness parameter used for the parts, `ε / 2^{k+1}`.
    #[serde(with = "rational::serde_str")]
    pub part_epsilon: Rational,
    pub rounds_used: usize,
    pub splits: usize,
}

struct Ctx<'a> {
    h: &'a Hypergraph,
    pm: &'a ProductMeasure,
    part_views: Vec<(BinaryView, ViewWeights)>,
    /// Views with point coordinates `J`, keyed by the bitmask of `J`.
    j_views: BTreeMap<usize, (BinaryView, ViewWeights)>,
}

impl<'a> Ctx<'a> {
    fn new(h: &'a Hypergraph, pm: &'a ProductMeasure) -> Result<Self> {
        let mut part_views = Vec::new();
        for i in 0..h.k() {
            let v = BinaryView::new(h, &[i])?;
            let w = pm.view_weights(&v);
            part_views.push((v, w));
        }
        Ok(Ctx {
            h,
            pm,
            part_views,
            j_views: BTreeMap::new(),
        })
    }

    fn j_view(&mut self, mask: usize) -> Result<&(BinaryView, ViewWeights)> {
        if !self.j_views.contains_key(&mask) {
            let coords: Vec<usize> = (0..self.h.k()).filter(|&c| mask >> c & 1 == 1).collect();
            let v = BinaryView::new(self.h, &coords)?;
            let w = self.pm.view_weights(&v);
            self.j_views.insert(mask, (v, w));
        }
        Ok(&self.j_views[&mask])
    }
}

/// Σ-free regular partition for stable relations; the homogeneity of every
/// box is verified before returning.
pub fn stable_regular_partition(
    h: &Hypergraph,
    measures: &[Measure],
    eps: &Rational,
    opts: &StableOptions,
) -> Result<StableOutcome> {
    if !rational::is_positive(eps) || *eps >= rational::one() {
        return Err(Error::input("epsilon must lie in (0, 1)"));
    }
    let pm = ProductMeasure::for_hypergraph(h, measures)?;
    let k = h.k();
    let mut ctx = Ctx::new(h, &pm)?;
    let part_eps = eps * rational::pow2_inv(k as u32 + 1);

    let mut ladders = vec![None; k];
    let d_hat = match opts.d_hat {
        Some(d) => d,
        None => {
            for (i, (v, _)) in ctx.part_views.iter().enumerate() {
                ladders[i] = Some(ladder_view(v, opts.depth_cap.max(1)));
            }
            ladders.iter().flatten().map(|l| l.length).max().unwrap_or(0)
        }
    };

    let mut classes: Vec<Vec<BitSet>> = Vec::with_capacity(k);
    let mut descents = Vec::with_capacity(k);
    for (i, (v, w)) in ctx.part_views.iter().enumerate() {
        let refined = refine_to_good(v, w, &bits::full(v.n_points()), &part_eps, opts.depth_cap)?;
        descents.push(DescentPartition {
            part: i,
            epsilon: part_eps.clone(),
            classes: sorted_classes(&refined.pieces),
            extractions: describe_extractions(v, w, &refined),
            residue: refined.residue.ones().map(|x| x as u32).collect(),
            residue_route: refined.route,
            max_depth: refined.max_depth,
            d_hat,
            step_bound: step_bound(&part_eps, d_hat),
            precondition_met: below_pow2(&part_eps, d_hat),
        });
        classes.push(refined.pieces);
    }

    let rounds = opts.rounds.unwrap_or(2 * k);
    let mut rounds_used = 0;
    let mut splits = 0;
    for _ in 0..rounds {
        rounds_used += 1;
        let snapshot = classes.clone();
        let mut changed = false;
        for n in 0..k {
            let mut queue: VecDeque<BitSet> = classes[n].drain(..).collect();
            let mut done = Vec::new();
            let mut local = 0;
            while let Some(a) = queue.pop_front() {
                let split = if local < SPLIT_LIMIT {
                    excellence_split(&mut ctx, n, &a, &snapshot, &part_eps)?
                } else {
                    None
                };
                match split {
                    Some((a0, a1)) => {
                        local += 1;
                        splits += 1;
                        changed = true;
                        let (v, w) = &ctx.part_views[n];
                        for piece in [a0, a1] {
                            let refined = refine_to_good(v, w, &piece, &part_eps, opts.depth_cap)?;
                            queue.extend(refined.pieces);
                        }
                    }
                    None => done.push(a),
                }
            }
            classes[n] = done;
        }
        if !changed {
            break;
        }
    }

    let class_lists: Vec<Vec<Vec<u32>>> = classes.iter().map(|c| sorted_classes(c)).collect();
    let params: Vec<Vec<Vec<u32>>> = (0..k)
        .map(|i| {
            let (v, w) = &ctx.part_views[i];
            separating_params(v, w, &class_lists[i])
        })
        .collect();
    let partition = labelled(h, &pm, eps, class_lists, params);
    let report = crate::regularity::verify_with_measure(h, &pm, &partition);
    if !report.passed() {
        return Err(Error::SurrogateInsufficient(format!(
            "after {} rounds: {:?}",
            rounds_used,
            report.violations.first()
        )));
    }
    Ok(StableOutcome {
        partition,
        report,
        descents,
        ladders,
        d_hat,
        precondition_met: below_pow2(eps, d_hat),
        part_epsilon: part_eps,
        rounds_used,
        splits,
    })
}

/// Looks for a good box `B` over some coordinates `J` (a product of current
/// classes) and `c` on the remaining coordinates that cut `A` into two
/// pieces of relative measure at least ε.
fn excellence_split(
    ctx: &mut Ctx<'_>,
    n: usize,
    a: &BitSet,
    classes: &[Vec<BitSet>],
    eps: &Rational,
) -> Result<Option<(BitSet, BitSet)>> {
    let h = ctx.h;
    let k = h.k();
    let (_, pw) = &ctx.part_views[n];
    let mass_a = pw.point_mass(a);
    if mass_a == 0 {
        return Ok(None);
    }
    let a_weights = pw.points.clone();
    for mask in 1usize..(1 << k) {
        if mask >> n & 1 == 1 {
            continue;
        }
        let j: Vec<usize> = (0..k).filter(|&c| mask >> c & 1 == 1).collect();
        let rest: Vec<usize> = (0..k)
            .filter(|&c| c != n && mask >> c & 1 == 0)
            .collect();
        let counts: Vec<usize> = j.iter().map(|&c| classes[c].len()).collect();
        let (view, w) = ctx.j_view(mask)?;
        let rest_sizes: Vec<usize> = rest.iter().map(|&c| h.part_size(c)).collect();
        for cell in Tuples::new(&counts) {
            let sides: Vec<Vec<u32>> = cell
                .iter()
                .zip(&j)
                .map(|(&ci, &c)| classes[c][ci as usize].ones().map(|v| v as u32).collect())
                .collect();
            let b = box_points(view, &ProductBox { sides });
            if w.point_mass(&b) == 0 || !goodness(view, w, &b, eps)?.good {
                continue;
            }
            let mb = w.point_mass(&b);
            for c in Tuples::new(&rest_sizes) {
                let mut a0 = BitSet::with_capacity(a.len());
                let mut a1 = BitSet::with_capacity(a.len());
                let mut clean = true;
                for x in a.ones() {
                    let mut param = vec![0u32; k];
                    param[n] = x as u32;
                    for (&cc, &v) in rest.iter().zip(&c) {
                        param[cc] = v;
                    }
                    let ptuple: Vec<u32> = view.param_coords().iter().map(|&cc| param[cc]).collect();
                    let fib = view.fiber(view.param_index(&ptuple));
                    let y = w.point_mass(&bits::intersection(fib, &b));
                    if rational::lt_scaled(y, eps, mb) {
                        a0.insert(x);
                    } else if rational::lt_scaled(mb - y, eps, mb) {
                        a1.insert(x);
                    } else {
                        clean = false;
                        break;
                    }
                }
                if !clean {
                    continue;
                }
                let m0 = bits::weighted(&a0, &a_weights);
                let m1 = bits::weighted(&a1, &a_weights);
                if !rational::lt_scaled(m0, eps, mass_a) && !rational::lt_scaled(m1, eps, mass_a) {
                    return Ok(Some((a0, a1)));
                }
            }
        }
    }
    Ok(None)
}

fn box_points(view: &BinaryView, b: &ProductBox) -> BitSet {
    let mut out = BitSet::with_capacity(view.n_points());
    for t in b.tuples() {
        out.insert(view.point_index(&t));
    }
    out
}

/// Parameters whose fiber atoms refine `classes` on the positive-weight
/// points, chosen greedily in index order.
fn separating_params(view: &BinaryView, w: &ViewWeights, classes: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let n = view.n_points();
    let mut class_of = vec![0usize; n];
    for (i, c) in classes.iter().enumerate() {
        for &v in c {
            class_of[v as usize] = i;
        }
    }
    let live: Vec<usize> = (0..n).filter(|&a| w.points[a] > 0).collect();
    let mut atom = vec![0usize; n];
    let mut chosen = Vec::new();
    let mixed = |atom: &[usize]| {
        let mut first: BTreeMap<usize, usize> = BTreeMap::new();
        live.iter().any(|&a| *first.entry(atom[a]).or_insert(class_of[a]) != class_of[a])
    };
    for b in 0..view.n_params() {
        if !mixed(&atom) {
            break;
        }
        // Useful if it splits an atom that mixes classes.
        let mut seen: BTreeMap<usize, (bool, bool, usize, bool)> = BTreeMap::new();
        for &a in &live {
            let e = seen.entry(atom[a]).or_insert((false, false, class_of[a], false));
            if view.related(a, b) {
                e.0 = true;
            } else {
                e.1 = true;
            }
            if e.2 != class_of[a] {
                e.3 = true;
            }
        }
        if seen.values().any(|&(i, o, _, m)| i && o && m) {
            chosen.push(b);
            let mut ids: BTreeMap<(usize, bool), usize> = BTreeMap::new();
            for a in 0..n {
                let len = ids.len();
                atom[a] = *ids.entry((atom[a], view.related(a, b))).or_insert(len);
            }
        }
    }
    chosen.into_iter().map(|b| view.param_tuple(b)).collect()
}

fn labelled(
    h: &Hypergraph,
    pm: &ProductMeasure,
    eps: &Rational,
    classes: Vec<Vec<Vec<u32>>>,
    params: Vec<Vec<Vec<u32>>>,
) -> RegularPartition {
    let assignment: Vec<Vec<usize>> = classes
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
    let counts: Vec<usize> = classes.iter().map(Vec::len).collect();
    let stats = cell_stats(h, pm, &assignment, None);
    let mut labels = Vec::new();
    for (cell, s) in Tuples::new(&counts).zip(&stats) {
        if s.mass == 0 {
            continue;
        }
        let label = u8::from(rational::lt_scaled(s.mass - s.edge, eps, s.mass));
        labels.push(BoxLabel {
            cell: cell.iter().map(|&c| c as usize).collect(),
            label,
        });
    }
    RegularPartition {
        epsilon: eps.clone(),
        classes,
        sigma: Vec::new(),
        labels,
        params,
        uniform: false,
    }
}

/// Outcome of checking that `B × A` is 2ε-good.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductGoodness {
    pub holds: bool,
    /// `B` is ε-good.
    pub b_good: bool,
    /// For every `c`, `A` splits against `B` with one side below ε.
    pub a_splits: bool,
    pub witness: Option<Vec<u32>>,
    #[serde(with = "rational::serde_str::option")]
    pub witness_density: Option<Rational>,
}

/// `B ⊆ V_{[n-1]}` is a box over the first `n - 1` parts and `A ⊆ V_n`
/// (part `n - 1`, counting from zero).
pub fn product_goodness_check(
    h: &Hypergraph,
    measures: &[Measure],
    n: usize,
    a: &[u32],
    b: &ProductBox,
    eps: &Rational,
) -> Result<ProductGoodness> {
    let k = h.k();
    if n < 2 || n > k {
        return Err(Error::input(format!("n must lie in 2..={}", k)));
    }
    if b.sides.len() != n - 1 {
        return Err(Error::input("B must be a box over the first n - 1 parts"));
    }
    b.check_bounds(&h.part_sizes()[..n - 1])?;
    if a.iter().any(|&v| v as usize >= h.part_size(n - 1)) {
        return Err(Error::input("A is not a subset of the part"));
    }
    let pm = ProductMeasure::for_hypergraph(h, measures)?;
    let pre: Vec<usize> = (0..n - 1).collect();
    let bview = BinaryView::new(h, &pre)?;
    let bw = pm.view_weights(&bview);
    let bset = box_points(&bview, b);
    let b_good = goodness(&bview, &bw, &bset, eps)?.good;

    let aw = &pm.part(n - 1).ticks;
    let mass_a: u128 = a.iter().map(|&v| aw[v as usize]).sum();
    if mass_a == 0 {
        return Err(Error::ZeroMeasure);
    }
    let mb = bw.point_mass(&bset);
    let rest_sizes: Vec<usize> = (n..k).map(|c| h.part_size(c)).collect();
    let mut a_splits = true;
    for c in Tuples::new(&rest_sizes) {
        let (mut m0, mut m1) = (0u128, 0u128);
        for &x in a {
            let mut ptuple = vec![x];
            ptuple.extend_from_slice(&c);
            let y = bw.point_mass(&bits::intersection(bview.fiber(bview.param_index(&ptuple)), &bset));
            if rational::lt_scaled(y, eps, mb) {
                m0 += aw[x as usize];
            } else if rational::lt_scaled(mb - y, eps, mb) {
                m1 += aw[x as usize];
            } else {
                a_splits = false;
            }
        }
        if !rational::lt_scaled(m0, eps, mass_a) && !rational::lt_scaled(m1, eps, mass_a) {
            a_splits = false;
        }
    }

    let full: Vec<usize> = (0..n).collect();
    let view = BinaryView::new(h, &full)?;
    let w = pm.view_weights(&view);
    let mut sides = b.sides.clone();
    sides.push(a.to_vec());
    let set = box_points(&view, &ProductBox::new(sides));
    let two = eps * rational::int(2);
    let g = goodness(&view, &w, &set, &two)?;
    Ok(ProductGoodness {
        holds: g.good,
        b_good,
        a_splits,
        witness: g.witness.map(|(c, _)| view.param_tuple(c)),
        witness_density: g.witness.map(|(_, x)| rational::from_ticks(x, g.mass)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn blocks(n: usize, size: usize) -> Hypergraph {
        Hypergraph::from_predicate(vec![n, n], false, move |t| {
            t[0] as usize / size == t[1] as usize / size
        })
        .unwrap()
    }

    #[test]
    fn block_union_is_recovered() {
        for m in 1..=4usize {
            let h = blocks(4 * m, 4);
            let out = stable_regular_partition(
                &h,
                &Measure::uniform_for(&h),
                &frac(1, 8),
                &StableOptions::default(),
            )
            .unwrap();
            assert_eq!(out.partition.class_counts(), vec![m, m]);
            assert!(out.partition.sigma.is_empty());
            assert!(out.report.passed());
        }
    }

    #[test]
    fn three_partite_same_block() {
        let h = Hypergraph::from_predicate(vec![4, 4, 4], false, |t| {
            t[0] / 2 == t[1] / 2 && t[1] / 2 == t[2] / 2
        })
        .unwrap();
        let out = stable_regular_partition(
            &h,
            &Measure::uniform_for(&h),
            &frac(1, 8),
            &StableOptions::default(),
        )
        .unwrap();
        assert_eq!(out.partition.class_counts(), vec![2, 2, 2]);
        assert_eq!(out.partition.labels.len(), 8);
    }

    #[test]
    fn product_goodness_on_blocks() {
        let h = Hypergraph::from_predicate(vec![4, 4, 4], false, |t| {
            t[0] / 2 == t[1] / 2 && t[1] / 2 == t[2] / 2
        })
        .unwrap();
        let ms = Measure::uniform_for(&h);
        let b = ProductBox::new(vec![vec![0, 1]]);
        let r = product_goodness_check(&h, &ms, 2, &[0, 1], &b, &frac(1, 8)).unwrap();
        assert!(r.holds && r.b_good && r.a_splits);
        let empty = Hypergraph::new(vec![3, 3], Vec::<Vec<u32>>::new(), false).unwrap();
        let r = product_goodness_check(
            &empty,
            &Measure::uniform_for(&empty),
            2,
            &[0, 2],
            &ProductBox::new(vec![vec![1]]),
            &frac(1, 8),
        )
        .unwrap();
        assert!(r.holds);
    }
}
