use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dyadic::{odd_split_density, DyadicBall, Parity};
use crate::bits::{self, BitSet};
use crate::error::{Error, Result};
use crate::hypergraph::{BinaryView, Hypergraph};
use crate::measure::Measure;
use crate::rational::{self, Rational};
use crate::vc::Combinations;

/// Parameter tuples enumerated exactly before switching to sampling.
pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;

/// Largest number of fibers combined.
const MAX_COMPLEXITY: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exact,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneousWitness {
    /// Parameters whose fibers define the set.
    pub params: Vec<u32>,
    pub set: Vec<u32>,
    #[serde(with = "rational::serde_str")]
    pub mass: Rational,
    /// Edge density over distinct ordered pairs.
    #[serde(with = "rational::serde_str")]
    pub density: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneousSearch {
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    pub m: usize,
    pub mode: SearchMode,
    pub budget: u64,
    pub seed: u64,
    pub tuples_examined: u64,
    pub sets_examined: u64,
    /// Heaviest set with density outside `(ε, 1 - ε)`; `None` is NOT-FOUND.
    pub found: Option<HomogeneousWitness>,
    /// Smallest `min(d, 1 - d)` over all examined sets.
    #[serde(with = "rational::serde_str::option")]
    pub closest_deviation: Option<Rational>,
}

struct AtomStats {
    mass: Vec<u128>,
    square: Vec<u128>,
    /// `edge[s][t]`: edge mass between atoms over distinct pairs.
    edge: Vec<Vec<u128>>,
    members: Vec<BitSet>,
}

fn atom_stats(view: &BinaryView, ticks: &[u128], params: &[usize]) -> AtomStats {
    let atoms = crate::vc::atoms_over(view, params);
    let n = view.n_points();
    let members: Vec<BitSet> = atoms
        .iter()
        .map(|a| bits::from_indices(n, a.iter().copied()))
        .collect();
    let mut atom_of = vec![0usize; n];
    for (i, a) in atoms.iter().enumerate() {
        for &x in a {
            atom_of[x] = i;
        }
    }
    let na = atoms.len();
    let mut edge = vec![vec![0u128; na]; na];
    for x in 0..n {
        if ticks[x] == 0 {
            continue;
        }
        // Symmetric relation: the cofiber of x is its neighbourhood.
        let nbrs = view.cofiber(x);
        for (t, m) in members.iter().enumerate() {
            let mut w = bits::weighted(&bits::intersection(nbrs, m), ticks);
            if t == atom_of[x] && nbrs.contains(x) {
                w -= ticks[x];
            }
            edge[atom_of[x]][t] += ticks[x] * w;
        }
    }
    AtomStats {
        mass: members.iter().map(|m| bits::weighted(m, ticks)).collect(),
        square: atoms
            .iter()
            .map(|a| a.iter().map(|&x| ticks[x] * ticks[x]).sum())
            .collect(),
        edge,
        members,
    }
}

/// Searches Boolean combinations of at most `m` fibers of a symmetric graph
/// for the heaviest set whose distinct-pair edge density is within `ε` of 0
/// or 1.
pub fn definable_homogeneous_search(
    h: &Hypergraph,
    measure: &Measure,
    eps: &Rational,
    m: usize,
    budget: u64,
    seed: u64,
) -> Result<HomogeneousSearch> {
    if h.k() != 2 || !h.is_symmetric() {
        return Err(Error::input("homogeneous search needs a symmetric graph"));
    }
    if !rational::is_positive(eps) || *eps >= rational::frac(1, 2) {
        return Err(Error::input("epsilon must lie in (0, 1/2)"));
    }
    if m > MAX_COMPLEXITY {
        return Err(Error::input(format!("m must be at most {}", MAX_COMPLEXITY)));
    }
    if measure.len() != h.part_size(0) {
        return Err(Error::input("measure does not match the vertex set"));
    }
    let tw = measure.ticks()?;
    let view = BinaryView::new(h, &[0])?;
    let n = view.n_params();
    let total: u128 = (0..=m).map(|j| rational::binomial(n as u64, j as u64)).sum();
    let mode = if total <= budget as u128 {
        SearchMode::Exact
    } else {
        SearchMode::Sampled
    };
    let mut out = HomogeneousSearch {
        epsilon: eps.clone(),
        m,
        mode,
        budget,
        seed,
        tuples_examined: 0,
        sets_examined: 0,
        found: None,
        closest_deviation: None,
    };
    let mut best_mass = 0u128;
    let mut visit = |params: &[usize], out: &mut HomogeneousSearch| {
        out.tuples_examined += 1;
        let st = atom_stats(&view, &tw.ticks, params);
        let na = st.members.len();
        for mask in 1u32..(1u32 << na) {
            let chosen: Vec<usize> = (0..na).filter(|&s| mask >> s & 1 == 1).collect();
            let mass: u128 = chosen.iter().map(|&s| st.mass[s]).sum();
            let pairs = mass * mass - chosen.iter().map(|&s| st.square[s]).sum::<u128>();
            if pairs == 0 {
                continue;
            }
            out.sets_examined += 1;
            let edge: u128 = chosen
                .iter()
                .flat_map(|&s| chosen.iter().map(move |&t| (s, t)))
                .map(|(s, t)| st.edge[s][t])
                .sum();
            let dev = rational::from_ticks(edge.min(pairs - edge), pairs);
            if out.closest_deviation.as_ref().is_none_or(|c| dev < *c) {
                out.closest_deviation = Some(dev);
            }
            let homogeneous =
                rational::le_scaled(edge, eps, pairs) || rational::le_scaled(pairs - edge, eps, pairs);
            if homogeneous && mass > best_mass {
                best_mass = mass;
                let mut set = BitSet::with_capacity(view.n_points());
                for &s in &chosen {
                    set.union_with(&st.members[s]);
                }
                out.found = Some(HomogeneousWitness {
                    params: params.iter().map(|&b| b as u32).collect(),
                    set: set.ones().map(|v| v as u32).collect(),
                    mass: rational::from_ticks(mass, tw.denom),
                    density: rational::from_ticks(edge, pairs),
                });
            }
        }
    };
    match mode {
        SearchMode::Exact => {
            for j in 0..=m {
                for params in Combinations::new(n, j) {
                    visit(&params, &mut out);
                }
            }
        }
        SearchMode::Sampled => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..budget {
                let j = rng.gen_range(0..=m);
                let mut params: Vec<usize> = (0..j).map(|_| rng.gen_range(0..n)).collect();
                params.sort_unstable();
                params.dedup();
                visit(&params, &mut out);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallSearchRow {
    pub prefix_len: usize,
    #[serde(with = "rational::serde_str")]
    pub density: Rational,
    pub homogeneous: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallSearch {
    pub depth: usize,
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    pub min_codepth: usize,
    pub rows: Vec<BallSearchRow>,
    /// Heaviest homogeneous ball, as a prefix length.
    pub found: Option<usize>,
    #[serde(with = "rational::serde_str")]
    pub closest_deviation: Rational,
}

/// Single balls of the dyadic graph with co-depth at least `min_codepth`.
/// The density of a ball depends only on its prefix length, so one ball per
/// length is examined.
pub fn dyadic_ball_search(
    depth: usize,
    eps: &Rational,
    parity: Parity,
    min_codepth: usize,
) -> Result<BallSearch> {
    if min_codepth < 2 || depth < min_codepth {
        return Err(Error::input("need depth ≥ min co-depth ≥ 2"));
    }
    let mut rows = Vec::new();
    let mut found = None;
    let mut closest: Option<Rational> = None;
    let one = rational::one();
    for l in 0..=depth - min_codepth {
        let d = odd_split_density(&[DyadicBall::new(vec![false; l])], depth, parity)?.density;
        let dev = d.clone().min(one.clone() - d.clone());
        let homogeneous = dev <= *eps;
        if homogeneous && found.is_none() {
            found = Some(l);
        }
        if closest.as_ref().is_none_or(|c| dev < *c) {
            closest = Some(dev);
        }
        rows.push(BallSearchRow {
            prefix_len: l,
            density: d,
            homogeneous,
        });
    }
    Ok(BallSearch {
        depth,
        epsilon: eps.clone(),
        min_codepth,
        rows,
        found,
        closest_deviation: closest.expect("at least one row"),
    })
}
