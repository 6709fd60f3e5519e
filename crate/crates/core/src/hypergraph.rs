//! Finite k-partite relations, fibers, boxes and binary views.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::bits::{self, BitSet};
use crate::error::{Error, Result};

/// Products larger than this keep no dense membership index and fall back
/// to binary search over the sorted edge list.
const DENSE_LIMIT: usize = 1 << 26;

/// A relation `R ⊆ V_1 × … × V_k` with `V_i = {0, …, part_sizes[i] - 1}`.
///
/// Edges are kept as a lexicographically sorted, duplicate-free flat list
/// (stride `k`), plus a dense bit index over the row-major linear order of the
/// product when the product is small enough.
#[derive(Clone, Debug)]
pub struct Hypergraph {
    part_sizes: Vec<usize>,
    strides: Vec<usize>,
    edges: Vec<u32>,
    symmetric: bool,
    dense: Option<BitSet>,
}

impl PartialEq for Hypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.part_sizes == other.part_sizes
            && self.edges == other.edges
            && self.symmetric == other.symmetric
    }
}

impl Eq for Hypergraph {}

impl Hypergraph {
    pub fn new<I, T>(part_sizes: Vec<usize>, edges: I, symmetric: bool) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u32]>,
    {
        let k = part_sizes.len();
        if k == 0 {
            return Err(Error::input("arity must be at least 1"));
        }
        if part_sizes.iter().any(|&s| s == 0 || s > u32::MAX as usize) {
            return Err(Error::input("part sizes must be positive"));
        }
        let total = part_sizes
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .ok_or_else(|| Error::input("product of part sizes overflows"))?;

        let mut tuples: Vec<Vec<u32>> = Vec::new();
        for e in edges {
            let e = e.as_ref();
            if e.len() != k {
                return Err(Error::input(format!(
                    "edge {:?} has arity {}, expected {}",
                    e,
                    e.len(),
                    k
                )));
            }
            if let Some(i) = (0..k).find(|&i| e[i] as usize >= part_sizes[i]) {
                return Err(Error::input(format!(
                    "edge {:?} out of bounds in coordinate {} (size {})",
                    e, i, part_sizes[i]
                )));
            }
            tuples.push(e.to_vec());
        }
        tuples.sort_unstable();
        tuples.dedup();

        let strides = strides_for(&part_sizes);
        let dense = (total <= DENSE_LIMIT).then(|| {
            let mut set = BitSet::with_capacity(total);
            for t in &tuples {
                set.insert(linear(&strides, t));
            }
            set
        });
        let graph = Hypergraph {
            part_sizes,
            strides,
            edges: tuples.into_iter().flatten().collect(),
            symmetric,
            dense,
        };
        if symmetric {
            graph.validate_symmetric()?;
        }
        Ok(graph)
    }

    /// Builds the relation `{t : pred(t)}` by enumerating the whole product.
    pub fn from_predicate(
        part_sizes: Vec<usize>,
        symmetric: bool,
        mut pred: impl FnMut(&[u32]) -> bool,
    ) -> Result<Self> {
        let mut edges = Vec::new();
        for t in Tuples::new(&part_sizes) {
            if pred(&t) {
                edges.push(t);
            }
        }
        Hypergraph::new(part_sizes, edges, symmetric)
    }

    fn validate_symmetric(&self) -> Result<()> {
        let first = self.part_sizes[0];
        if self.part_sizes.iter().any(|&s| s != first) {
            return Err(Error::input("symmetric hypergraph needs equal part sizes"));
        }
        for e in self.edges() {
            let mut p = e.to_vec();
            p.sort_unstable();
            // Every arrangement of the multiset must be present.
            loop {
                if !self.contains(&p) {
                    return Err(Error::input(format!(
                        "symmetric flag set but permutation {:?} of edge {:?} is missing",
                        p, e
                    )));
                }
                if !next_permutation(&mut p) {
                    break;
                }
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.part_sizes.len()
    }

    pub fn part_sizes(&self) -> &[usize] {
        &self.part_sizes
    }

    pub fn part_size(&self, i: usize) -> usize {
        self.part_sizes[i]
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len() / self.k()
    }

    pub fn edges(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.edges.chunks_exact(self.k())
    }

    /// Number of tuples in the full product.
    pub fn tuple_count(&self) -> usize {
        self.part_sizes.iter().product()
    }

    /// Row-major position of `t` in the product.
    pub fn linear_index(&self, t: &[u32]) -> usize {
        linear(&self.strides, t)
    }

    pub fn tuple_at(&self, mut idx: usize) -> Vec<u32> {
        let mut t = vec![0u32; self.k()];
        for i in 0..self.k() {
            t[i] = (idx / self.strides[i]) as u32;
            idx %= self.strides[i];
        }
        t
    }

    pub fn contains(&self, t: &[u32]) -> bool {
        if t.len() != self.k() || t.iter().zip(&self.part_sizes).any(|(&v, &s)| v as usize >= s) {
            return false;
        }
        match &self.dense {
            Some(set) => set.contains(self.linear_index(t)),
            None => {
                let k = self.k();
                let (mut lo, mut hi) = (0, self.edge_count());
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    match self.edges[mid * k..(mid + 1) * k].cmp(t) {
                        core::cmp::Ordering::Less => lo = mid + 1,
                        core::cmp::Ordering::Greater => hi = mid,
                        core::cmp::Ordering::Equal => return true,
                    }
                }
                false
            }
        }
    }

    /// Membership bitset over the row-major linear order of the product.
    pub fn membership(&self) -> BitSet {
        match &self.dense {
            Some(set) => set.clone(),
            None => bits::from_indices(
                self.tuple_count(),
                self.edges().map(|e| self.linear_index(e)),
            ),
        }
    }

    /// The fiber `R_b = {a ∈ V_I : (a, b) ∈ R}`; `points` is `I` (0-based
    /// coordinates) and `param` lists the remaining coordinates in order.
    pub fn fiber(&self, points: &[usize], param: &[u32]) -> Result<Fiber> {
        let (point_coords, param_coords) = split_coords(self.k(), points)?;
        if param.len() != param_coords.len() {
            return Err(Error::input(format!(
                "parameter has length {}, expected {}",
                param.len(),
                param_coords.len()
            )));
        }
        for (&c, &v) in param_coords.iter().zip(param) {
            if v as usize >= self.part_sizes[c] {
                return Err(Error::input(format!(
                    "parameter value {} out of bounds for coordinate {}",
                    v, c
                )));
            }
        }
        let point_sizes: Vec<usize> = point_coords.iter().map(|&c| self.part_sizes[c]).collect();
        let mut members = Vec::new();
        let mut full = vec![0u32; self.k()];
        for (&c, &v) in param_coords.iter().zip(param) {
            full[c] = v;
        }
        for a in Tuples::new(&point_sizes) {
            for (&c, &v) in point_coords.iter().zip(&a) {
                full[c] = v;
            }
            if self.contains(&full) {
                members.push(a);
            }
        }
        Ok(Fiber {
            points: point_coords,
            parameter: param.to_vec(),
            members,
        })
    }

    /// `R_a` for a value `a` of the last coordinate, as a relation on the
    /// first `k - 1` parts.
    pub fn last_fiber_relation(&self, a: u32) -> Hypergraph {
        let k = self.k();
        debug_assert!(k >= 2);
        let edges: Vec<&[u32]> = self
            .edges()
            .filter(|e| e[k - 1] == a)
            .map(|e| &e[..k - 1])
            .collect();
        Hypergraph::new(self.part_sizes[..k - 1].to_vec(), edges, false)
            .expect("sub-relation of a valid relation is valid")
    }

    /// Reorders coordinates: new coordinate `j` is old coordinate `order[j]`.
    pub fn permute(&self, order: &[usize]) -> Result<Hypergraph> {
        let mut seen = order.to_vec();
        seen.sort_unstable();
        if seen != (0..self.k()).collect::<Vec<_>>() {
            return Err(Error::input("not a permutation of the coordinates"));
        }
        let sizes = order.iter().map(|&o| self.part_sizes[o]).collect();
        let edges: Vec<Vec<u32>> = self
            .edges()
            .map(|e| order.iter().map(|&o| e[o]).collect())
            .collect();
        Hypergraph::new(sizes, edges, self.symmetric)
    }

    pub fn complement(&self) -> Hypergraph {
        let member = self.membership();
        let edges: Vec<Vec<u32>> = (0..self.tuple_count())
            .filter(|&i| !member.contains(i))
            .map(|i| self.tuple_at(i))
            .collect();
        Hypergraph::new(self.part_sizes.clone(), edges, self.symmetric)
            .expect("complement of a valid relation is valid")
    }
}

/// Exact member set of one fiber.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fiber {
    /// The coordinates `I` the members live on.
    pub points: Vec<usize>,
    /// Values of the complementary coordinates, in increasing coordinate order.
    pub parameter: Vec<u32>,
    pub members: Vec<Vec<u32>>,
}

/// A box `X_1 × … × X_k`; sides are sorted vertex lists.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProductBox {
    pub sides: Vec<Vec<u32>>,
}

impl ProductBox {
    pub fn new(mut sides: Vec<Vec<u32>>) -> Self {
        for s in &mut sides {
            s.sort_unstable();
            s.dedup();
        }
        ProductBox { sides }
    }

    pub fn full(part_sizes: &[usize]) -> Self {
        ProductBox {
            sides: part_sizes.iter().map(|&n| (0..n as u32).collect()).collect(),
        }
    }

    pub fn from_bitsets(sides: &[BitSet]) -> Self {
        ProductBox {
            sides: sides
                .iter()
                .map(|s| s.ones().map(|v| v as u32).collect())
                .collect(),
        }
    }

    pub fn check_bounds(&self, part_sizes: &[usize]) -> Result<()> {
        if self.sides.len() != part_sizes.len() {
            return Err(Error::input("box arity does not match"));
        }
        for (i, side) in self.sides.iter().enumerate() {
            if side.iter().any(|&v| v as usize >= part_sizes[i]) {
                return Err(Error::input(format!("box side {} out of bounds", i)));
            }
        }
        Ok(())
    }

    pub fn side_bitsets(&self, part_sizes: &[usize]) -> Vec<BitSet> {
        self.sides
            .iter()
            .zip(part_sizes)
            .map(|(s, &n)| bits::from_indices(n, s.iter().map(|&v| v as usize)))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.sides.iter().any(|s| s.is_empty())
    }

    /// Every tuple of the box, lexicographically.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        let sizes: Vec<usize> = self.sides.iter().map(|s| s.len()).collect();
        Tuples::new(&sizes).map(move |pos| {
            pos.iter()
                .zip(&self.sides)
                .map(|(&p, side)| side[p as usize])
                .collect()
        })
    }
}

/// `R` viewed as a binary relation between `V_I` ("points") and `V_{I°}`
/// ("parameters"), with both fiber directions cached as bitsets.
///
/// Points and parameters are numbered by the row-major order of their tuples,
/// which coincides with lexicographic order.
#[derive(Clone, Debug)]
pub struct BinaryView {
    point_coords: Vec<usize>,
    param_coords: Vec<usize>,
    point_sizes: Vec<usize>,
    param_sizes: Vec<usize>,
    fibers: Vec<BitSet>,
    cofibers: Vec<BitSet>,
}

impl BinaryView {
    pub fn new(h: &Hypergraph, points: &[usize]) -> Result<Self> {
        let (point_coords, param_coords) = split_coords(h.k(), points)?;
        let point_sizes: Vec<usize> = point_coords.iter().map(|&c| h.part_sizes[c]).collect();
        let param_sizes: Vec<usize> = param_coords.iter().map(|&c| h.part_sizes[c]).collect();
        let n_points: usize = point_sizes.iter().product();
        let n_params: usize = param_sizes.iter().product();
        let point_strides = strides_for(&point_sizes);
        let param_strides = strides_for(&param_sizes);
        let mut fibers = vec![BitSet::with_capacity(n_points); n_params];
        let mut cofibers = vec![BitSet::with_capacity(n_params); n_points];
        for e in h.edges() {
            let p = point_coords
                .iter()
                .zip(&point_strides)
                .map(|(&c, &s)| e[c] as usize * s)
                .sum::<usize>();
            let q = param_coords
                .iter()
                .zip(&param_strides)
                .map(|(&c, &s)| e[c] as usize * s)
                .sum::<usize>();
            fibers[q].insert(p);
            cofibers[p].insert(q);
        }
        Ok(BinaryView {
            point_coords,
            param_coords,
            point_sizes,
            param_sizes,
            fibers,
            cofibers,
        })
    }

    pub fn point_coords(&self) -> &[usize] {
        &self.point_coords
    }

    pub fn param_coords(&self) -> &[usize] {
        &self.param_coords
    }

    pub fn n_points(&self) -> usize {
        self.cofibers.len()
    }

    pub fn n_params(&self) -> usize {
        self.fibers.len()
    }

    /// `R_b` over the points, for parameter index `b`.
    pub fn fiber(&self, b: usize) -> &BitSet {
        &self.fibers[b]
    }

    pub fn fibers(&self) -> &[BitSet] {
        &self.fibers
    }

    /// The parameters whose fiber contains point `a`.
    pub fn cofiber(&self, a: usize) -> &BitSet {
        &self.cofibers[a]
    }

    pub fn cofibers(&self) -> &[BitSet] {
        &self.cofibers
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.fibers[b].contains(a)
    }

    pub fn point_tuple(&self, a: usize) -> Vec<u32> {
        unlinear(&self.point_sizes, a)
    }

    pub fn param_tuple(&self, b: usize) -> Vec<u32> {
        unlinear(&self.param_sizes, b)
    }

    pub fn point_index(&self, t: &[u32]) -> usize {
        linear(&strides_for(&self.point_sizes), t)
    }

    pub fn param_index(&self, t: &[u32]) -> usize {
        linear(&strides_for(&self.param_sizes), t)
    }

    /// The view with the roles of points and parameters exchanged.
    pub fn transpose(&self) -> BinaryView {
        BinaryView {
            point_coords: self.param_coords.clone(),
            param_coords: self.point_coords.clone(),
            point_sizes: self.param_sizes.clone(),
            param_sizes: self.point_sizes.clone(),
            fibers: self.cofibers.clone(),
            cofibers: self.fibers.clone(),
        }
    }
}

/// Splits `[k]` into the sorted point coordinates and their complement.
pub fn split_coords(k: usize, points: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let set: BTreeSet<usize> = points.iter().copied().collect();
    if set.len() != points.len() || set.iter().any(|&c| c >= k) {
        return Err(Error::input(format!(
            "index set {:?} is not a set of coordinates below {}",
            points, k
        )));
    }
    let point_coords: Vec<usize> = set.into_iter().collect();
    let param_coords = (0..k).filter(|c| !point_coords.contains(c)).collect();
    Ok((point_coords, param_coords))
}

fn strides_for(sizes: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; sizes.len()];
    for i in (0..sizes.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * sizes[i + 1];
    }
    strides
}

fn linear(strides: &[usize], t: &[u32]) -> usize {
    t.iter().zip(strides).map(|(&v, &s)| v as usize * s).sum()
}

fn unlinear(sizes: &[usize], mut idx: usize) -> Vec<u32> {
    let mut t = vec![0u32; sizes.len()];
    for i in (0..sizes.len()).rev() {
        t[i] = (idx % sizes[i]) as u32;
        idx /= sizes[i];
    }
    t
}

fn next_permutation(p: &mut [u32]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Row-major odometer over `0..sizes[0] × … × 0..sizes[k-1]`.
#[derive(Clone, Debug)]
pub struct Tuples {
    sizes: Vec<usize>,
    next: Option<Vec<u32>>,
}

impl Tuples {
    pub fn new(sizes: &[usize]) -> Self {
        let next = if sizes.contains(&0) {
            None
        } else {
            Some(vec![0; sizes.len()])
        };
        Tuples {
            sizes: sizes.to_vec(),
            next,
        }
    }
}

impl Iterator for Tuples {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            succ[i] += 1;
            if (succ[i] as usize) < self.sizes[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_graph(n: u32) -> Hypergraph {
        Hypergraph::from_predicate(vec![n as usize; 2], false, |t| t[0] <= t[1]).unwrap()
    }

    #[test]
    fn fiber_of_complete_bipartite() {
        let h = Hypergraph::from_predicate(vec![2, 2], false, |_| true).unwrap();
        let f = h.fiber(&[0], &[0]).unwrap();
        assert_eq!(f.members, vec![vec![0], vec![1]]);
    }

    #[test]
    fn fiber_of_empty_relation() {
        let h = Hypergraph::new(vec![3, 3], Vec::<Vec<u32>>::new(), false).unwrap();
        assert!(h.fiber(&[1], &[2]).unwrap().members.is_empty());
    }

    #[test]
    fn fiber_of_half_graph() {
        let f = half_graph(4).fiber(&[0], &[2]).unwrap();
        assert_eq!(f.members, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn fiber_rejects_out_of_bounds_parameter() {
        assert!(half_graph(4).fiber(&[0], &[4]).is_err());
        assert!(half_graph(4).fiber(&[0], &[1, 1]).is_err());
        assert!(half_graph(4).fiber(&[2], &[1]).is_err());
    }

    #[test]
    fn edge_bounds_are_checked() {
        assert!(Hypergraph::new(vec![2, 2], [[0u32, 2]], false).is_err());
        assert!(Hypergraph::new(vec![2, 2], [[0u32, 1, 1]], false).is_err());
        assert!(Hypergraph::new(vec![], Vec::<Vec<u32>>::new(), false).is_err());
    }

    #[test]
    fn symmetric_flag_is_validated() {
        assert!(Hypergraph::new(vec![3, 3], [[0u32, 1]], true).is_err());
        assert!(Hypergraph::new(vec![3, 3], [[0u32, 1], [1, 0]], true).is_ok());
        assert!(Hypergraph::new(vec![3, 2], [[0u32, 0]], true).is_err());
        let tri = Hypergraph::from_predicate(vec![4; 3], true, |t| {
            t[0] != t[1] && t[1] != t[2] && t[0] != t[2]
        });
        assert!(tri.is_ok());
    }

    #[test]
    fn view_fibers_agree_with_direct_fibers() {
        let h = Hypergraph::from_predicate(vec![3, 4, 2], false, |t| (t[0] + t[1] * t[2]) % 3 == 0)
            .unwrap();
        for points in [vec![0], vec![1], vec![2], vec![0, 2], vec![1, 2]] {
            let view = BinaryView::new(&h, &points).unwrap();
            for b in 0..view.n_params() {
                let param = view.param_tuple(b);
                let direct = h.fiber(&points, &param).unwrap();
                let cached: Vec<Vec<u32>> =
                    view.fiber(b).ones().map(|a| view.point_tuple(a)).collect();
                assert_eq!(direct.members, cached);
            }
        }
    }

    #[test]
    fn dense_and_sparse_membership_agree() {
        let h = half_graph(5);
        let mut sparse = h.clone();
        sparse.dense = None;
        for t in Tuples::new(&[5, 5]) {
            assert_eq!(h.contains(&t), sparse.contains(&t));
        }
    }

    #[test]
    fn tuples_enumerate_row_major() {
        let all: Vec<Vec<u32>> = Tuples::new(&[2, 3]).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[3], vec![1, 0]);
        let h = half_graph(3);
        for (i, t) in Tuples::new(&[3, 3]).enumerate() {
            assert_eq!(h.linear_index(&t), i);
            assert_eq!(h.tuple_at(i), t);
        }
    }

    #[test]
    fn last_fiber_relation_matches_fibers() {
        let h = Hypergraph::from_predicate(vec![3; 3], false, |t| t[0] <= t[1] && t[1] <= t[2])
            .unwrap();
        let sub = h.last_fiber_relation(1);
        assert_eq!(sub.edges().count(), 3);
        assert!(sub.contains(&[0, 1]) && sub.contains(&[1, 1]) && sub.contains(&[0, 0]));
    }
}
