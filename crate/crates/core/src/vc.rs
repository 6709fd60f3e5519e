//! VC dimension, shatter function, Sauer–Shelah bounds and epsilon-nets.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{self, BitSet};
use crate::error::{Error, Result};
use crate::hypergraph::BinaryView;
use crate::measure::{Measure, TickWeights};
use crate::rational::{self, Rational};

/// Default cap for exhaustive VC search.
pub const DEFAULT_VC_CAP: usize = 8;

/// Random nets are re-drawn at most this many times before falling back to
/// the greedy construction.
pub const NET_RETRIES: u32 = 8;

/// Deduplicated family of subsets of `{0, …, ground - 1}`, members ordered
/// lexicographically by their sorted element lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    ground: usize,
    members: Vec<BitSet>,
}

impl SetFamily {
    pub fn new<S, I>(ground: usize, sets: S) -> Result<Self>
    where
        S: IntoIterator<Item = I>,
        I: IntoIterator<Item = usize>,
    {
        let mut members = Vec::new();
        for s in sets {
            let mut set = BitSet::with_capacity(ground);
            for x in s {
                if x >= ground {
                    return Err(Error::input(format!(
                        "element {} outside ground set of size {}",
                        x, ground
                    )));
                }
                set.insert(x);
            }
            members.push(set);
        }
        Ok(SetFamily::from_bitsets(ground, members))
    }

    pub fn from_bitsets(ground: usize, members: Vec<BitSet>) -> Self {
        let mut keyed: Vec<(Vec<usize>, BitSet)> = members
            .into_iter()
            .map(|mut m| {
                m.grow(ground);
                (bits::members(&m), m)
            })
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.0 == b.0);
        SetFamily {
            ground,
            members: keyed.into_iter().map(|(_, m)| m).collect(),
        }
    }

    /// The fiber family `{R_b : b}` over the points of a view.
    pub fn fibers(view: &BinaryView) -> Self {
        SetFamily::from_bitsets(view.n_points(), view.fibers().to_vec())
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn members(&self) -> &[BitSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn trace(member: &BitSet, subset: &[usize]) -> u64 {
        subset
            .iter()
            .enumerate()
            .filter(|(_, &x)| member.contains(x))
            .fold(0u64, |acc, (i, _)| acc | (1 << i))
    }

    /// Number of distinct traces `|F ∩ B|`.
    pub fn trace_count(&self, subset: &[usize]) -> usize {
        let traces: BTreeSet<u64> = self
            .members
            .iter()
            .map(|m| SetFamily::trace(m, subset))
            .collect();
        traces.len()
    }

    pub fn shatters(&self, subset: &[usize]) -> bool {
        let need = 1usize << subset.len();
        if self.members.len() < need {
            return false;
        }
        let mut seen = vec![false; need];
        let mut count = 0;
        for m in &self.members {
            let t = SetFamily::trace(m, subset) as usize;
            if !seen[t] {
                seen[t] = true;
                count += 1;
                if count == need {
                    return true;
                }
            }
        }
        false
    }
}

/// Result of a capped exhaustive VC search. `capped` means a set of size
/// `value` is shattered and larger sizes were not examined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VcDimension {
    pub value: usize,
    pub capped: bool,
}

impl core::fmt::Display for VcDimension {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.capped {
            write!(f, ">= {}", self.value)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

/// Work allowance, in member traces, for the VC measurements that only
/// annotate other results.
pub const VC_WORK_BUDGET: u64 = 1 << 26;

/// Largest `d ≤ cap` such that some `d`-subset of the ground set is shattered.
///
/// Shattering is hereditary, so candidates of size `s` are grown only from
/// shattered sets of size `s - 1` (in size-then-lex order), and the search
/// stops at the first empty level.
pub fn vc_dimension(family: &SetFamily, cap: usize) -> VcDimension {
    vc_dimension_budgeted(family, cap, u64::MAX)
}

/// As [`vc_dimension`], but gives up once about `budget` member traces have
/// been computed. A search cut short reports the last complete level as a
/// lower bound with `capped` set.
pub fn vc_dimension_budgeted(family: &SetFamily, cap: usize, budget: u64) -> VcDimension {
    let cap = cap.min(62);
    if family.is_empty() {
        return VcDimension {
            value: 0,
            capped: false,
        };
    }
    let per_test = family.len() as u64;
    let mut work = 0u64;
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    for size in 1..=cap {
        if family.len() < (1usize << size) {
            return VcDimension {
                value: size - 1,
                capped: false,
            };
        }
        let mut next = Vec::new();
        for s in &level {
            let start = s.last().map_or(0, |&x| x + 1);
            for x in start..family.ground() {
                work = work.saturating_add(per_test);
                if work > budget {
                    return VcDimension {
                        value: size - 1,
                        capped: true,
                    };
                }
                let mut cand = s.clone();
                cand.push(x);
                if family.shatters(&cand) {
                    next.push(cand);
                }
            }
        }
        if next.is_empty() {
            return VcDimension {
                value: size - 1,
                capped: false,
            };
        }
        level = next;
    }
    let exact = cap >= family.ground() || family.len() < (1usize << (cap + 1));
    VcDimension {
        value: cap,
        capped: !exact,
    }
}

/// `π_F(n) = max_{|B| = n} |F ∩ B|`, exhaustively.
pub fn shatter_function(family: &SetFamily, n: usize) -> Result<u64> {
    if n > family.ground() {
        return Err(Error::input(format!(
            "n = {} exceeds ground size {}",
            n,
            family.ground()
        )));
    }
    if n > 62 {
        return Err(Error::input("n too large for exhaustive traces"));
    }
    let ceiling = (family.len() as u64).min(1u64 << n);
    let mut best = 0u64;
    for subset in Combinations::new(family.ground(), n) {
        best = best.max(family.trace_count(&subset) as u64);
        if best == ceiling {
            break;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SauerCheck {
    pub d: usize,
    pub n: usize,
    pub shatter: u64,
    pub bound: u128,
    pub holds: bool,
}

/// Checks `π_F(n) ≤ Σ_{i≤d} C(n, i)`.
pub fn sauer_check(family: &SetFamily, d: usize, n: usize) -> Result<SauerCheck> {
    if n < d {
        return Err(Error::Precondition(format!("n = {} is below d = {}", n, d)));
    }
    let shatter = shatter_function(family, n)?;
    let bound = rational::sauer_sum(n as u64, d as u64);
    Ok(SauerCheck {
        d,
        n,
        shatter,
        bound,
        holds: (shatter as u128) <= bound,
    })
}

/// Atom count of the Boolean algebra generated by `{R_b : b ∈ D}` on the
/// points of `view`, against the Sauer-type bound `Σ_{i≤d} C(|D|, i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefinableCount {
    pub atoms: usize,
    pub bound: u128,
    /// VC dimension of the fiber family `{R_b}`.
    pub vc_fibers: VcDimension,
    /// VC dimension of the dual family (point types over the parameters).
    pub vc_dual: VcDimension,
    /// `max(vc_fibers, vc_dual)`, the dimension of the relation.
    pub d: usize,
    pub within_power_set: bool,
    pub within_bound: bool,
}

/// Atoms over `params`: classes of points with equal membership pattern.
pub fn atoms_over(view: &BinaryView, params: &[usize]) -> Vec<Vec<usize>> {
    let mut classes: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for a in 0..view.n_points() {
        let pattern: Vec<bool> = params.iter().map(|&b| view.related(a, b)).collect();
        classes.entry(pattern).or_default().push(a);
    }
    let mut out: Vec<Vec<usize>> = classes.into_values().collect();
    out.sort();
    out
}

pub fn definable_count_bound(view: &BinaryView, params: &[usize]) -> Result<DefinableCount> {
    if let Some(&b) = params.iter().find(|&&b| b >= view.n_params()) {
        return Err(Error::input(format!("parameter index {} out of range", b)));
    }
    let mut distinct: Vec<usize> = params.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let atoms = atoms_over(view, &distinct).len();
    let vc_fibers = vc_dimension_budgeted(&SetFamily::fibers(view), DEFAULT_VC_CAP, VC_WORK_BUDGET);
    let vc_dual =
        vc_dimension_budgeted(&SetFamily::fibers(&view.transpose()), DEFAULT_VC_CAP, VC_WORK_BUDGET);
    let d = vc_fibers.value.max(vc_dual.value);
    let bound = rational::sauer_sum(distinct.len() as u64, d as u64);
    let power = if distinct.len() >= 127 {
        u128::MAX
    } else {
        1u128 << distinct.len()
    };
    Ok(DefinableCount {
        atoms,
        bound,
        vc_fibers,
        vc_dual,
        d,
        within_power_set: atoms as u128 <= power,
        within_bound: atoms as u128 <= bound || vc_fibers.capped || vc_dual.capped,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetStrategy {
    Greedy,
    Random,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsNet {
    /// The net as a point multiset (random draws may repeat points).
    pub points: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    pub requested: NetStrategy,
    /// Strategy that produced the returned net (random falls back to greedy).
    pub used: NetStrategy,
    /// Random draws attempted; 0 for greedy.
    pub attempts: u32,
    pub verified: bool,
    /// VC dimension used for the size formula (at least 1).
    pub d: usize,
    /// `⌈8 d (1/ε) max(1, ln(1/ε))⌉`.
    pub size_bound_ln: u64,
    /// `⌈8 d (1/ε) max(1, log2(1/ε))⌉`.
    pub size_bound_log2: u64,
}

/// Sample size `⌈8 d (1/ε) max(1, log(1/ε))⌉` for natural and base-2 logs.
pub fn net_size_bounds(d: usize, eps: &Rational) -> (u64, u64) {
    let inv = 1.0 / rational::to_f64(eps);
    let base = 8.0 * d as f64 * inv;
    let ln = libm::ceil(base * libm::fmax(1.0, libm::log(inv)));
    let lg = libm::ceil(base * libm::fmax(1.0, libm::log2(inv)));
    (ln as u64, lg as u64)
}

/// Every member of measure `≥ ε` meets the net.
pub fn verify_net(family: &SetFamily, weights: &TickWeights, eps: &Rational, net: &[usize]) -> bool {
    let hit = bits::from_indices(family.ground(), net.iter().copied());
    heavy_members(family, weights, eps)
        .iter()
        .all(|m| !m.is_disjoint(&hit))
}

fn heavy_members<'a>(family: &'a SetFamily, weights: &TickWeights, eps: &Rational) -> Vec<&'a BitSet> {
    family
        .members()
        .iter()
        .filter(|m| !rational::lt_scaled(weights.mass(m), eps, weights.denom))
        .collect()
}

/// Greedy stabbing: visit heavy members by (largest element, then
/// lexicographically) and add the largest element of each one not yet hit.
pub fn greedy_net(family: &SetFamily, weights: &TickWeights, eps: &Rational) -> Vec<usize> {
    let mut heavy: Vec<Vec<usize>> = heavy_members(family, weights, eps)
        .into_iter()
        .map(bits::members)
        .collect();
    heavy.sort_by(|a, b| a.last().cmp(&b.last()).then_with(|| a.cmp(b)));
    let mut hit = BitSet::with_capacity(family.ground());
    let mut net = Vec::new();
    for m in &heavy {
        if m.iter().any(|&x| hit.contains(x)) {
            continue;
        }
        let x = *m.last().expect("heavy members are nonempty");
        hit.insert(x);
        net.push(x);
    }
    net
}

pub fn epsilon_net(
    family: &SetFamily,
    measure: &Measure,
    eps: &Rational,
    strategy: NetStrategy,
    seed: u64,
) -> Result<EpsNet> {
    if measure.len() != family.ground() {
        return Err(Error::input(format!(
            "measure has {} weights, ground set has {} points",
            measure.len(),
            family.ground()
        )));
    }
    if !rational::is_positive(eps) {
        return Err(Error::input("epsilon must be positive"));
    }
    let weights = measure.ticks()?;
    let d = vc_dimension_budgeted(family, DEFAULT_VC_CAP, VC_WORK_BUDGET).value.max(1);
    let (size_bound_ln, size_bound_log2) = net_size_bounds(d, eps);
    let mut net = EpsNet {
        points: Vec::new(),
        epsilon: eps.clone(),
        requested: strategy,
        used: NetStrategy::Greedy,
        attempts: 0,
        verified: false,
        d,
        size_bound_ln,
        size_bound_log2,
    };

    if strategy == NetStrategy::Random && *eps < rational::one() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cumulative: Vec<u128> = weights
            .ticks
            .iter()
            .scan(0u128, |acc, &t| {
                *acc += t;
                Some(*acc)
            })
            .collect();
        while net.attempts < NET_RETRIES {
            net.attempts += 1;
            let draw: Vec<usize> = (0..size_bound_ln)
                .map(|_| {
                    let u = rng.gen_range(0..weights.denom);
                    cumulative.partition_point(|&c| c <= u)
                })
                .collect();
            if verify_net(family, &weights, eps, &draw) {
                net.points = draw;
                net.used = NetStrategy::Random;
                net.verified = true;
                return Ok(net);
            }
        }
    }

    net.points = greedy_net(family, &weights, eps);
    net.verified = verify_net(family, &weights, eps, &net.points);
    if !net.verified {
        return Err(Error::internal("greedy net failed verification"));
    }
    Ok(net)
}

/// Lexicographic `r`-subsets of `0..n`.
#[derive(Clone, Debug)]
pub struct Combinations {
    n: usize,
    next: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, r: usize) -> Self {
        Combinations {
            n,
            next: (r <= n).then(|| (0..r).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let r = current.len();
        let mut succ = current.clone();
        let mut i = r;
        while i > 0 {
            i -= 1;
            if succ[i] < self.n - r + i {
                succ[i] += 1;
                for j in i + 1..r {
                    succ[j] = succ[j - 1] + 1;
                }
                self.next = Some(succ);
                break;
            }
        }
        Some(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Hypergraph;
    use crate::rational::frac;

    fn powerset(n: usize) -> SetFamily {
        let sets = (0..1usize << n).map(|mask| (0..n).filter(move |i| mask >> i & 1 == 1));
        SetFamily::new(n, sets).unwrap()
    }

    fn intervals(n: usize) -> SetFamily {
        let mut sets: Vec<Vec<usize>> = vec![vec![]];
        for a in 0..n {
            for b in a..n {
                sets.push((a..=b).collect());
            }
        }
        SetFamily::new(n, sets).unwrap()
    }

    #[test]
    fn vc_examples() {
        assert_eq!(vc_dimension(&powerset(3), 8), VcDimension { value: 3, capped: false });
        let just_empty = SetFamily::new(4, [Vec::<usize>::new()]).unwrap();
        assert_eq!(vc_dimension(&just_empty, 8).value, 0);
        assert_eq!(vc_dimension(&intervals(6), 8), VcDimension { value: 2, capped: false });
    }

    #[test]
    fn vc_cap_is_reported() {
        let d = vc_dimension(&powerset(5), 2);
        assert_eq!(d, VcDimension { value: 2, capped: true });
    }

    #[test]
    fn shatter_examples() {
        assert_eq!(shatter_function(&powerset(3), 2).unwrap(), 4);
        assert_eq!(shatter_function(&intervals(10), 3).unwrap(), 7);
        let single = SetFamily::new(5, [vec![1, 3]]).unwrap();
        for n in 0..=5 {
            assert_eq!(shatter_function(&single, n).unwrap(), 1);
        }
        assert!(shatter_function(&single, 6).is_err());
    }

    #[test]
    fn budget_gives_lower_bound() {
        let d = vc_dimension_budgeted(&powerset(6), 8, 64 * 10);
        assert!(d.capped && d.value < 6);
        assert_eq!(vc_dimension_budgeted(&powerset(6), 8, u64::MAX), vc_dimension(&powerset(6), 8));
    }

    #[test]
    fn sauer_examples() {
        let c = sauer_check(&intervals(10), 2, 3).unwrap();
        assert_eq!((c.shatter, c.bound, c.holds), (7, 7, true));
        let c = sauer_check(&powerset(3), 3, 3).unwrap();
        assert_eq!((c.shatter, c.bound, c.holds), (8, 8, true));
        let half = Hypergraph::from_predicate(vec![8, 8], false, |t| t[0] <= t[1]).unwrap();
        let fam = SetFamily::fibers(&BinaryView::new(&half, &[0]).unwrap());
        let c = sauer_check(&fam, 1, 4).unwrap();
        assert!(c.holds && c.shatter <= 5);
        assert!(sauer_check(&fam, 3, 2).is_err());
    }

    #[test]
    fn definable_count_examples() {
        let half = Hypergraph::from_predicate(vec![4, 4], false, |t| t[0] <= t[1]).unwrap();
        let view = BinaryView::new(&half, &[0]).unwrap();
        assert_eq!(definable_count_bound(&view, &[]).unwrap().atoms, 1);
        let c = definable_count_bound(&view, &[0, 1, 2, 3]).unwrap();
        // Nested fibers {0}, {0,1}, {0,1,2}, {0,1,2,3} cut four points into
        // four nonempty atoms; the fifth sign pattern is empty here.
        assert_eq!(c.atoms, 4);
        assert_eq!(c.bound, 5);
        assert!(c.within_bound && c.within_power_set);

        let complete = Hypergraph::from_predicate(vec![3, 5], false, |_| true).unwrap();
        let view = BinaryView::new(&complete, &[1]).unwrap();
        assert_eq!(definable_count_bound(&view, &[0, 2]).unwrap().atoms, 1);
    }

    #[test]
    fn greedy_net_on_single_member() {
        let fam = SetFamily::new(5, [vec![0, 2, 4]]).unwrap();
        let m = Measure::new(0, vec![frac(1, 5); 5]).unwrap();
        let net = epsilon_net(&fam, &m, &frac(1, 2), NetStrategy::Greedy, 0).unwrap();
        assert_eq!(net.points.len(), 1);
        assert!([0, 2, 4].contains(&net.points[0]));
        assert!(net.verified);
    }

    #[test]
    fn greedy_net_on_intervals_takes_every_fifth_point() {
        let fam = intervals(20);
        let m = Measure::uniform(0, 20);
        let net = epsilon_net(&fam, &m, &frac(1, 4), NetStrategy::Greedy, 0).unwrap();
        assert_eq!(net.points, vec![4, 9, 14, 19]);
        assert!(net.verified);
    }

    #[test]
    fn epsilon_one_nets() {
        let fam = intervals(6);
        let m = Measure::uniform(0, 6);
        let net = epsilon_net(&fam, &m, &rational::int(1), NetStrategy::Random, 3).unwrap();
        // The full interval has measure 1 and must be hit.
        assert_eq!(net.points.len(), 1);
        let no_full = SetFamily::new(6, [vec![0, 1], vec![2]]).unwrap();
        let net = epsilon_net(&no_full, &m, &rational::int(1), NetStrategy::Greedy, 0).unwrap();
        assert!(net.points.is_empty());
    }

    #[test]
    fn random_net_is_verified_and_reproducible() {
        let fam = intervals(20);
        let m = Measure::uniform(0, 20);
        let a = epsilon_net(&fam, &m, &frac(1, 4), NetStrategy::Random, 42).unwrap();
        let b = epsilon_net(&fam, &m, &frac(1, 4), NetStrategy::Random, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.verified);
        assert_eq!(a.used, NetStrategy::Random);
        assert_eq!(a.points.len() as u64, a.size_bound_ln);
    }

    #[test]
    fn net_size_formula() {
        // 8 * 2 * 4 * ln 4 = 88.72...; with log2: 8 * 2 * 4 * 2 = 128.
        assert_eq!(net_size_bounds(2, &frac(1, 4)), (89, 128));
        // ε above 1/e uses the max(1, ·) guard.
        assert_eq!(net_size_bounds(1, &frac(1, 2)), (16, 16));
    }

    #[test]
    fn bad_inputs() {
        let fam = intervals(4);
        let m = Measure::uniform(0, 5);
        assert!(epsilon_net(&fam, &m, &frac(1, 2), NetStrategy::Greedy, 0).is_err());
        let m = Measure::uniform(0, 4);
        assert!(epsilon_net(&fam, &m, &rational::int(0), NetStrategy::Greedy, 0).is_err());
        assert!(SetFamily::new(3, [vec![3]]).is_err());
    }

    #[test]
    fn combinations_enumerate_lexicographically() {
        let all: Vec<Vec<usize>> = Combinations::new(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        assert_eq!(Combinations::new(3, 0).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }
}
