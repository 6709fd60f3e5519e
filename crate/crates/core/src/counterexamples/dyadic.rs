use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::rational::{self, Rational};

/// Deepest tree handled; pair counts then stay below 2^124.
pub const MAX_DEPTH: usize = 62;

/// The ball of all depth-`L` leaves extending a bit-string prefix.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DyadicBall {
    prefix: Vec<bool>,
}

#[allow(clippy::len_without_is_empty)]
impl DyadicBall {
    pub fn new(prefix: Vec<bool>) -> Self {
        DyadicBall { prefix }
    }

    pub fn root() -> Self {
        DyadicBall { prefix: Vec::new() }
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::input(format!("bad prefix character {:?}", c))),
            })
            .collect::<Result<Vec<bool>>>()
            .map(DyadicBall::new)
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn len(&self) -> usize {
        self.prefix.len()
    }

    pub fn is_root(&self) -> bool {
        self.prefix.is_empty()
    }

    /// Leaves at depth `depth` (`depth ≥ len`).
    pub fn leaf_count(&self, depth: usize) -> u128 {
        1u128 << (depth - self.len())
    }

    pub fn measure(&self) -> Rational {
        rational::pow2_inv(self.len() as u32)
    }

    /// Whether `self` lies inside `other`.
    pub fn within(&self, other: &DyadicBall) -> bool {
        self.prefix.starts_with(&other.prefix)
    }

    pub fn child(&self, bit: bool) -> DyadicBall {
        let mut p = self.prefix.clone();
        p.push(bit);
        DyadicBall { prefix: p }
    }

    /// First leaf index (leaves numbered by their bits, most significant
    /// first).
    pub fn first_leaf(&self, depth: usize) -> u64 {
        let mut x = 0u64;
        for &b in &self.prefix {
            x = (x << 1) | u64::from(b);
        }
        x << (depth - self.len())
    }
}

impl fmt::Display for DyadicBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.prefix.is_empty() {
            return f.write_str("");
        }
        for &b in &self.prefix {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl TryFrom<String> for DyadicBall {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        DyadicBall::parse(&s)
    }
}

impl From<DyadicBall> for String {
    fn from(b: DyadicBall) -> String {
        format!("{}", b)
    }
}

/// Which valuations carry an edge. The default reads `v(x, y)` as the length
/// of the common prefix and puts an edge on odd values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    #[default]
    Odd,
    Even,
}

impl Parity {
    pub fn is_edge(self, v: usize) -> bool {
        (v % 2 == 1) == (self == Parity::Odd)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCount {
    /// Common-prefix length of the pairs counted.
    pub level: usize,
    pub pairs: u128,
    pub edge: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicDensity {
    pub depth: usize,
    pub balls: Vec<DyadicBall>,
    pub parity: Parity,
    pub leaves: u128,
    /// Ordered pairs of distinct leaves.
    pub pairs: u128,
    pub edge_pairs: u128,
    #[serde(with = "rational::serde_str")]
    pub density: Rational,
    pub levels: Vec<LevelCount>,
}

fn check_union(balls: &[DyadicBall], depth: usize) -> Result<()> {
    if depth > MAX_DEPTH {
        return Err(Error::input(format!("depth {} exceeds {}", depth, MAX_DEPTH)));
    }
    if balls.is_empty() {
        return Err(Error::input("empty ball union"));
    }
    for (i, b) in balls.iter().enumerate() {
        if b.len() > depth {
            return Err(Error::input(format!("ball {} is deeper than {}", b, depth)));
        }
        for c in &balls[i + 1..] {
            if b.within(c) || c.within(b) {
                return Err(Error::input(format!("balls {:?} and {:?} overlap", b, c)));
            }
        }
    }
    Ok(())
}

fn common_prefix(a: &DyadicBall, b: &DyadicBall) -> usize {
    a.prefix
        .iter()
        .zip(&b.prefix)
        .take_while(|(x, y)| x == y)
        .count()
}

/// Ordered distinct-pair counts by common-prefix length for a disjoint union
/// of balls.
fn level_pairs(balls: &[DyadicBall], depth: usize) -> Vec<u128> {
    let mut pairs = vec![0u128; depth];
    for b in balls {
        let l = b.len();
        let r = depth - l;
        // 2^j nodes at relative level j, each splitting into two halves of
        // 2^(r-j-1) leaves.
        for j in 0..r {
            pairs[l + j] += (1u128 << j) * 2 * (1u128 << (2 * (r - j - 1)));
        }
    }
    for (i, a) in balls.iter().enumerate() {
        for b in &balls[i + 1..] {
            pairs[common_prefix(a, b)] += 2 * a.leaf_count(depth) * b.leaf_count(depth);
        }
    }
    pairs
}

/// Density of `E` over ordered pairs of distinct leaves of the union.
pub fn odd_split_density(
    balls: &[DyadicBall],
    depth: usize,
    parity: Parity,
) -> Result<DyadicDensity> {
    check_union(balls, depth)?;
    let leaves: u128 = balls.iter().map(|b| b.leaf_count(depth)).sum();
    if leaves < 2 {
        return Err(Error::input("union has fewer than two leaves"));
    }
    let per_level = level_pairs(balls, depth);
    let pairs = leaves * (leaves - 1);
    let edge_pairs: u128 = per_level
        .iter()
        .enumerate()
        .filter(|&(v, _)| parity.is_edge(v))
        .map(|(_, &c)| c)
        .sum();
    debug_assert_eq!(per_level.iter().sum::<u128>(), pairs);
    Ok(DyadicDensity {
        depth,
        balls: balls.to_vec(),
        parity,
        leaves,
        pairs,
        edge_pairs,
        density: rational::from_ticks(edge_pairs, pairs),
        levels: per_level
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(v, &c)| LevelCount {
                level: v,
                pairs: c,
                edge: parity.is_edge(v),
            })
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityRow {
    pub prefix_len: usize,
    pub codepth: usize,
    #[serde(with = "rational::serde_str")]
    pub density: Rational,
    /// 2/3 when the top split level carries edges, else 1/3.
    #[serde(with = "rational::serde_str")]
    pub limit: Rational,
    #[serde(with = "rational::serde_str")]
    pub deviation: Rational,
    /// 0 for even co-depth, `1/(3(2^r - 1))` otherwise.
    #[serde(with = "rational::serde_str")]
    pub allowed: Rational,
    pub within: bool,
}

/// Density of a single ball for every prefix length below `depth`.
pub fn ball_parity_report(depth: usize, parity: Parity) -> Result<Vec<ParityRow>> {
    if depth < 2 {
        return Err(Error::input("depth must be at least 2"));
    }
    let mut rows = Vec::new();
    for l in 0..depth {
        let ball = DyadicBall::new(vec![false; l]);
        let d = odd_split_density(&[ball], depth, parity)?;
        let r = depth - l;
        // Half of all pairs split at the top level.
        let limit = if parity.is_edge(l) {
            rational::frac(2, 3)
        } else {
            rational::frac(1, 3)
        };
        let deviation = abs(&(d.density.clone() - limit.clone()));
        let allowed = if r.is_multiple_of(2) {
            rational::int(0)
        } else {
            Rational::new(1.into(), (3 * ((1u128 << r) - 1)).into())
        };
        rows.push(ParityRow {
            prefix_len: l,
            codepth: r,
            within: deviation <= allowed,
            density: d.density,
            limit,
            deviation,
            allowed,
        });
    }
    Ok(rows)
}

fn abs(x: &Rational) -> Rational {
    if *x < rational::int(0) {
        -x.clone()
    } else {
        x.clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntiHomogeneity {
    pub depth: usize,
    #[serde(with = "rational::serde_str")]
    pub density: Rational,
    /// `μ²(E ∩ A×A)` with each leaf weighing `2^-L`.
    #[serde(with = "rational::serde_str")]
    pub pair_mass: Rational,
    #[serde(with = "rational::serde_str")]
    pub mu_a: Rational,
    #[serde(with = "rational::serde_str")]
    pub gamma: Rational,
    #[serde(with = "rational::serde_str")]
    pub slack: Rational,
    /// `(1 - γ²/3 + slack) μ(A)²`.
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
    pub verdict: bool,
}

/// Edge mass on a ball union `A` against the bound forced by a ball `B ⊆ A`.
pub fn anti_homogeneity_bound_check(
    a: &[DyadicBall],
    b: &DyadicBall,
    depth: usize,
    parity: Parity,
) -> Result<AntiHomogeneity> {
    let d = odd_split_density(a, depth, parity)?;
    if b.len() > depth || !a.iter().any(|x| b.within(x)) {
        return Err(Error::input(format!("ball {:?} is not contained in the union", b)));
    }
    let total = Rational::new(1.into(), (1u128 << depth).into());
    let pair_mass = Rational::from_integer(d.edge_pairs.into()) * total.clone() * total.clone();
    let mu_a = Rational::from_integer(d.leaves.into()) * total;
    let gamma = b.measure() / mu_a.clone();
    let r = depth - b.len();
    let g2 = gamma.clone() * gamma.clone();
    // A single leaf has no distinct pairs and forces nothing.
    let slack = if r == 0 {
        g2.clone() / rational::int(3)
    } else {
        g2.clone() / Rational::from_integer((3 * ((1u128 << r) - 1)).into())
    };
    let bound = (rational::one() - g2 / rational::int(3) + slack.clone()) * mu_a.clone() * mu_a.clone();
    Ok(AntiHomogeneity {
        depth,
        density: d.density,
        verdict: pair_mass <= bound,
        pair_mass,
        mu_a,
        gamma,
        slack,
        bound,
    })
}

/// A seeded disjoint ball union (by random splitting and dropping) and a ball
/// inside it.
pub fn random_ball_union(
    depth: usize,
    seed: u64,
    max_balls: usize,
) -> Result<(Vec<DyadicBall>, DyadicBall)> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::input("depth must lie in 1..=62"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut balls = vec![DyadicBall::root()];
    let target = rng.gen_range(1..=max_balls.max(1) * 2);
    for _ in 0..target {
        let splittable: Vec<usize> = (0..balls.len())
            .filter(|&i| balls[i].len() < depth - 1)
            .collect();
        if splittable.is_empty() {
            break;
        }
        let i = splittable[rng.gen_range(0..splittable.len())];
        let b = balls.swap_remove(i);
        balls.push(b.child(false));
        balls.push(b.child(true));
    }
    balls.sort();
    let keep = rng.gen_range(1..=balls.len().min(max_balls.max(1)));
    while balls.len() > keep {
        let i = rng.gen_range(0..balls.len());
        balls.remove(i);
    }
    let b = balls[rng.gen_range(0..balls.len())].clone();
    Ok((balls, b))
}

/// The odd-split graph on the `2^depth` leaves as a symmetric relation.
pub fn dyadic_graph(depth: usize, parity: Parity) -> Result<Hypergraph> {
    if depth == 0 || depth > 12 {
        return Err(Error::input("graph export supports depth 1..=12"));
    }
    let n = 1usize << depth;
    Hypergraph::from_predicate(vec![n, n], true, |t| {
        if t[0] == t[1] {
            return false;
        }
        let v = (t[0] ^ t[1]).leading_zeros() as usize - (32 - depth);
        parity.is_edge(v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn full_tree_depth_four() {
        let d = odd_split_density(&[DyadicBall::root()], 4, Parity::Odd).unwrap();
        assert_eq!(d.pairs, 240);
        assert_eq!(d.edge_pairs, 80);
        assert_eq!(d.density, frac(1, 3));
        let counts: Vec<u128> = d.levels.iter().map(|l| l.pairs).collect();
        assert_eq!(counts, vec![128, 64, 32, 16]);
    }

    #[test]
    fn prefix_one_depth_five() {
        let b = DyadicBall::parse("1").unwrap();
        assert_eq!(odd_split_density(&[b], 5, Parity::Odd).unwrap().density, frac(2, 3));
    }

    #[test]
    fn single_split_level() {
        for l in 0..6 {
            let b = DyadicBall::new(vec![true; l]);
            let d = odd_split_density(&[b], l + 1, Parity::Odd).unwrap();
            assert_eq!(d.density, rational::int((l % 2) as i64));
        }
    }

    #[test]
    fn overlapping_balls_rejected() {
        let a = DyadicBall::parse("0").unwrap();
        let b = DyadicBall::parse("01").unwrap();
        assert!(odd_split_density(&[a, b], 4, Parity::Odd).is_err());
    }

    #[test]
    fn parity_table() {
        let rows = ball_parity_report(6, Parity::Odd).unwrap();
        assert!(rows.iter().all(|r| r.within));
        assert_eq!(rows[0].density, frac(1, 3));
        assert_eq!(rows[1].density, frac(2, 3) + frac(1, 93));
    }

    #[test]
    fn flipped_parity_swaps_densities() {
        let d = odd_split_density(&[DyadicBall::root()], 4, Parity::Even).unwrap();
        assert_eq!(d.density, frac(2, 3));
    }

    #[test]
    fn bound_on_two_halves() {
        let a = vec![DyadicBall::parse("0").unwrap(), DyadicBall::parse("1").unwrap()];
        let r = anti_homogeneity_bound_check(&a, &a[0], 6, Parity::Odd).unwrap();
        assert_eq!(r.gamma, frac(1, 2));
        assert!(r.verdict);
    }

    #[test]
    fn ball_serde_is_a_bit_string() {
        let b = DyadicBall::parse("0110").unwrap();
        assert_eq!(String::from(b.clone()), "0110");
        assert_eq!(DyadicBall::try_from(String::from("0110")).unwrap(), b);
    }
}
