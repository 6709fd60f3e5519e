//! Weighted counting measures and their products.
//!
//! A [`Measure`] holds exact rational weights. For computation each measure is
//! rescaled to integer ticks over the least common denominator of its weights;
//! the product measure then counts ticks over the product of those
//! denominators, so every mass of every subset of the product is an exact
//! `u128`. Construction fails if that product does not fit.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::bits::{self, BitSet};
use crate::error::{Error, Result};
use crate::hypergraph::{BinaryView, Hypergraph, ProductBox};
use crate::rational::{self, Rational};

/// A probability measure on one part, given by per-vertex weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measure {
    part: usize,
    weights: Vec<Rational>,
}

impl Measure {
    pub fn new(part: usize, weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Measure("measure on an empty part".into()));
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::Measure(format!(
                "negative weight {}",
                rational::format(w)
            )));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::Measure(format!(
                "weights sum to {}, not 1",
                rational::format(&total)
            )));
        }
        Ok(Measure { part, weights })
    }

    pub fn uniform(part: usize, n: usize) -> Self {
        let w = rational::frac(1, n as i64);
        Measure {
            part,
            weights: vec![w; n],
        }
    }

    /// Uniform measures on every part of `h`.
    pub fn uniform_for(h: &Hypergraph) -> Vec<Measure> {
        h.part_sizes()
            .iter()
            .enumerate()
            .map(|(i, &n)| Measure::uniform(i, n))
            .collect()
    }

    pub fn part(&self) -> usize {
        self.part
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> &Rational {
        &self.weights[v]
    }

    pub fn mass(&self, set: impl IntoIterator<Item = usize>) -> Rational {
        set.into_iter().map(|v| self.weights[v].clone()).sum()
    }

    /// The support with multiplicities proportional to the weights: a point
    /// list whose counting average reproduces the measure exactly.
    pub fn support_multiset(&self) -> Result<Vec<usize>> {
        let ticks = self.ticks()?;
        let mut out = Vec::new();
        for (v, &t) in ticks.ticks.iter().enumerate() {
            let t = usize::try_from(t)
                .map_err(|_| Error::Measure("multiplicity does not fit in memory".into()))?;
            out.extend(core::iter::repeat_n(v, t));
        }
        Ok(out)
    }

    pub fn ticks(&self) -> Result<TickWeights> {
        let denom = self
            .weights
            .iter()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let d = denom
            .to_u64()
            .ok_or_else(|| Error::Measure("common denominator exceeds 64 bits".into()))?;
        let ticks = self
            .weights
            .iter()
            .map(|w| {
                (w.numer() * (&denom / w.denom()))
                    .to_u128()
                    .expect("numerator bounded by denominator")
            })
            .collect();
        Ok(TickWeights {
            ticks,
            denom: d as u128,
        })
    }
}

/// Integer weights over a common denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TickWeights {
    pub ticks: Vec<u128>,
    pub denom: u128,
}

impl TickWeights {
    pub fn mass(&self, set: &BitSet) -> u128 {
        bits::weighted(set, &self.ticks)
    }
}

/// The product `μ_1 × … × μ_k`. For weighted counting measures the iterated
/// semidirect product coincides with this plain product.
#[derive(Clone, Debug)]
pub struct ProductMeasure {
    parts: Vec<TickWeights>,
    total: u128,
}

impl ProductMeasure {
    /// Measures may be given in any order; their `part` fields must be
    /// exactly `0..k`.
    pub fn new(measures: &[Measure]) -> Result<Self> {
        let mut sorted: Vec<&Measure> = measures.iter().collect();
        sorted.sort_by_key(|m| m.part);
        if sorted.iter().enumerate().any(|(i, m)| m.part != i) {
            return Err(Error::Measure(
                "measures must cover parts 0..k exactly once".into(),
            ));
        }
        let parts = sorted
            .iter()
            .map(|m| m.ticks())
            .collect::<Result<Vec<_>>>()?;
        let total = parts
            .iter()
            .try_fold(1u128, |acc, p| acc.checked_mul(p.denom))
            .ok_or_else(|| {
                Error::Measure("product of weight denominators exceeds 128 bits".into())
            })?;
        Ok(ProductMeasure { parts, total })
    }

    /// Checks arity and part sizes against `h` as well.
    pub fn for_hypergraph(h: &Hypergraph, measures: &[Measure]) -> Result<Self> {
        if measures.len() != h.k() {
            return Err(Error::input(format!(
                "{} measures for a {}-partite relation",
                measures.len(),
                h.k()
            )));
        }
        let pm = ProductMeasure::new(measures)?;
        for (i, p) in pm.parts.iter().enumerate() {
            if p.ticks.len() != h.part_size(i) {
                return Err(Error::input(format!(
                    "measure on part {} has {} weights, part has {} vertices",
                    i,
                    p.ticks.len(),
                    h.part_size(i)
                )));
            }
        }
        Ok(pm)
    }

    pub fn uniform(h: &Hypergraph) -> Self {
        ProductMeasure::new(&Measure::uniform_for(h)).expect("uniform measures are valid")
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    /// Ticks of the whole product.
    pub fn denom(&self) -> u128 {
        self.total
    }

    pub fn part(&self, i: usize) -> &TickWeights {
        &self.parts[i]
    }

    /// The product of the first `k` factors.
    pub fn prefix(&self, k: usize) -> ProductMeasure {
        let parts = self.parts[..k].to_vec();
        let total = parts.iter().map(|p| p.denom).product();
        ProductMeasure { parts, total }
    }

    pub fn to_rational(&self, ticks: u128) -> Rational {
        rational::from_ticks(ticks, self.total)
    }

    pub fn tuple_ticks(&self, t: &[u32]) -> u128 {
        t.iter()
            .zip(&self.parts)
            .map(|(&v, p)| p.ticks[v as usize])
            .product()
    }

    pub fn box_ticks(&self, b: &ProductBox) -> u128 {
        b.sides
            .iter()
            .zip(&self.parts)
            .map(|(side, p)| side.iter().map(|&v| p.ticks[v as usize]).sum::<u128>())
            .product()
    }

    pub fn box_mass(&self, b: &ProductBox) -> Rational {
        self.to_rational(self.box_ticks(b))
    }

    pub fn set_ticks<'a>(&self, tuples: impl IntoIterator<Item = &'a [u32]>) -> u128 {
        tuples.into_iter().map(|t| self.tuple_ticks(t)).sum()
    }

    pub fn relation_ticks(&self, h: &Hypergraph) -> u128 {
        self.set_ticks(h.edges())
    }

    pub fn relation_mass(&self, h: &Hypergraph) -> Rational {
        self.to_rational(self.relation_ticks(h))
    }

    /// Weights of a sub-product over `coords` (ascending), indexed row-major,
    /// with their common denominator.
    pub fn coord_weights(&self, coords: &[usize]) -> (Vec<u128>, u128) {
        let mut weights = vec![1u128];
        let mut denom = 1u128;
        for &c in coords {
            let p = &self.parts[c];
            weights = weights
                .iter()
                .flat_map(|&w| p.ticks.iter().map(move |&t| w * t))
                .collect();
            denom *= p.denom;
        }
        (weights, denom)
    }

    pub fn view_weights(&self, view: &BinaryView) -> ViewWeights {
        let (points, point_denom) = self.coord_weights(view.point_coords());
        let (params, param_denom) = self.coord_weights(view.param_coords());
        ViewWeights {
            points,
            point_denom,
            params,
            param_denom,
        }
    }

    /// Per-tuple ticks over the row-major order of the whole product.
    pub fn all_tuple_ticks(&self) -> Vec<u128> {
        let coords: Vec<usize> = (0..self.k()).collect();
        self.coord_weights(&coords).0
    }
}

/// Point-side and parameter-side weights of a [`BinaryView`].
#[derive(Clone, Debug)]
pub struct ViewWeights {
    pub points: Vec<u128>,
    pub point_denom: u128,
    pub params: Vec<u128>,
    pub param_denom: u128,
}

impl ViewWeights {
    pub fn point_mass(&self, set: &BitSet) -> u128 {
        bits::weighted(set, &self.points)
    }

    pub fn param_mass(&self, set: &BitSet) -> u128 {
        bits::weighted(set, &self.params)
    }

    pub fn transpose(&self) -> ViewWeights {
        ViewWeights {
            points: self.params.clone(),
            point_denom: self.param_denom,
            params: self.points.clone(),
            param_denom: self.point_denom,
        }
    }
}

pub fn product_measure(measures: &[Measure]) -> Result<ProductMeasure> {
    ProductMeasure::new(measures)
}

/// Edge density `μ(E ∩ X) / μ(X)` of a box.
pub fn density(h: &Hypergraph, pm: &ProductMeasure, b: &ProductBox) -> Result<Rational> {
    b.check_bounds(h.part_sizes())?;
    let mass = pm.box_ticks(b);
    if mass == 0 {
        return Err(Error::ZeroMeasure);
    }
    let sides = b.side_bitsets(h.part_sizes());
    let edge = pm.set_ticks(
        h.edges()
            .filter(|e| e.iter().zip(&sides).all(|(&v, s)| s.contains(v as usize))),
    );
    Ok(rational::from_ticks(edge, mass))
}

/// Density over all tuples of the box and over tuples with pairwise distinct
/// coordinates. The second is `None` when distinct tuples carry no mass.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityVariants {
    #[serde(with = "rational::serde_str")]
    pub all: Rational,
    #[serde(with = "rational::serde_str::option")]
    pub distinct: Option<Rational>,
}

pub fn density_variants(
    h: &Hypergraph,
    pm: &ProductMeasure,
    b: &ProductBox,
) -> Result<DensityVariants> {
    let all = density(h, pm, b)?;
    let distinct = |t: &[u32]| {
        (0..t.len()).all(|i| (i + 1..t.len()).all(|j| t[i] != t[j]))
    };
    let mut mass = 0u128;
    let mut edge = 0u128;
    for t in b.tuples() {
        if distinct(&t) {
            let w = pm.tuple_ticks(&t);
            mass += w;
            if h.contains(&t) {
                edge += w;
            }
        }
    }
    Ok(DensityVariants {
        all,
        distinct: (mass > 0).then(|| rational::from_ticks(edge, mass)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FubiniReport {
    /// `max_b μ(R_b)` over the parameters.
    #[serde(with = "rational::serde_str")]
    pub max_fiber_mass: Rational,
    /// `(μ × ν)(R)`, computed by summing tuples.
    #[serde(with = "rational::serde_str")]
    pub product_mass: Rational,
    /// `Σ_b ν(b) μ(R_b)`, the fiberwise integral.
    #[serde(with = "rational::serde_str")]
    pub integrated_mass: Rational,
    pub holds: bool,
}

/// Weak Fubini probe on a binary view: if every fiber is lighter than `eps`
/// then so is the relation.
pub fn weak_fubini_check(view: &BinaryView, w: &ViewWeights, eps: &Rational) -> FubiniReport {
    let denom = w.point_denom * w.param_denom;
    let mut max_fiber = 0u128;
    let mut integrated = 0u128;
    for b in 0..view.n_params() {
        let m = w.point_mass(view.fiber(b));
        max_fiber = max_fiber.max(m);
        integrated += w.params[b] * m;
    }
    let mut direct = 0u128;
    for a in 0..view.n_points() {
        for b in view.cofiber(a).ones() {
            direct += w.points[a] * w.params[b];
        }
    }
    let premise = rational::lt_scaled(max_fiber, eps, w.point_denom);
    let conclusion = rational::lt_scaled(direct, eps, denom);
    FubiniReport {
        max_fiber_mass: rational::from_ticks(max_fiber, w.point_denom),
        product_mass: rational::from_ticks(direct, denom),
        integrated_mass: rational::from_ticks(integrated, denom),
        holds: !premise || conclusion,
    }
}

/// `μ(R Δ A)` where `a` is a membership bitset over the row-major product.
pub fn symmetric_difference_ticks(h: &Hypergraph, pm: &ProductMeasure, a: &BitSet) -> u128 {
    let r = h.membership();
    let diff = bits::symmetric_difference(&r, a);
    let mut total = 0u128;
    for idx in diff.ones() {
        total += pm.tuple_ticks(&h.tuple_at(idx));
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn half_graph(n: usize) -> Hypergraph {
        Hypergraph::from_predicate(vec![n, n], false, |t| t[0] <= t[1]).unwrap()
    }

    #[test]
    fn measure_validation() {
        assert!(Measure::new(0, vec![frac(1, 2), frac(1, 3)]).is_err());
        assert!(Measure::new(0, vec![frac(3, 2), frac(-1, 2)]).is_err());
        assert!(Measure::new(0, vec![]).is_err());
        assert!(Measure::new(0, vec![frac(1, 2), frac(1, 3), frac(1, 6)]).is_ok());
    }

    #[test]
    fn support_multiset_reproduces_weights() {
        let m = Measure::new(0, vec![frac(1, 2), frac(1, 3), frac(1, 6)]).unwrap();
        assert_eq!(m.support_multiset().unwrap(), vec![0, 0, 0, 1, 1, 2]);
    }

    #[test]
    fn box_masses() {
        let h = half_graph(4);
        let pm = ProductMeasure::uniform(&h);
        let b = ProductBox::new(vec![vec![0, 1], vec![0, 1]]);
        assert_eq!(pm.box_mass(&b), frac(1, 4));

        let skew = Measure::new(
            0,
            vec![frac(1, 2), frac(1, 2), rational::int(0), rational::int(0)],
        )
        .unwrap();
        let pm = ProductMeasure::new(&[skew, Measure::uniform(1, 4)]).unwrap();
        let b = ProductBox::new(vec![vec![0], vec![0, 1, 2, 3]]);
        assert_eq!(pm.box_mass(&b), frac(1, 2));
    }

    #[test]
    fn symmetric_difference_with_empty_approximation() {
        let h = half_graph(4);
        let pm = ProductMeasure::uniform(&h);
        let empty = BitSet::with_capacity(16);
        assert_eq!(
            pm.to_rational(symmetric_difference_ticks(&h, &pm, &empty)),
            frac(10, 16)
        );
    }

    #[test]
    fn densities() {
        let h = half_graph(4);
        let pm = ProductMeasure::uniform(&h);
        let full = ProductBox::full(h.part_sizes());
        assert_eq!(density(&h, &pm, &full).unwrap(), frac(10, 16));

        let complete = Hypergraph::from_predicate(vec![3, 3], false, |_| true).unwrap();
        let pm3 = ProductMeasure::uniform(&complete);
        let b = ProductBox::new(vec![vec![1], vec![0, 2]]);
        assert_eq!(density(&complete, &pm3, &b).unwrap(), rational::int(1));

        let empty = Hypergraph::new(vec![3, 3], Vec::<Vec<u32>>::new(), false).unwrap();
        assert_eq!(density(&empty, &pm3, &b).unwrap(), rational::int(0));

        let zero = ProductBox::new(vec![vec![], vec![0]]);
        assert_eq!(density(&complete, &pm3, &zero), Err(Error::ZeroMeasure));
    }

    #[test]
    fn distinct_density_drops_the_diagonal() {
        let clique = Hypergraph::from_predicate(vec![4, 4], true, |t| t[0] != t[1]).unwrap();
        let pm = ProductMeasure::uniform(&clique);
        let v = density_variants(&clique, &pm, &ProductBox::full(clique.part_sizes())).unwrap();
        assert_eq!(v.all, frac(12, 16));
        assert_eq!(v.distinct, Some(rational::int(1)));
    }

    #[test]
    fn weak_fubini_examples() {
        let empty = Hypergraph::new(vec![3, 3], Vec::<Vec<u32>>::new(), false).unwrap();
        let view = BinaryView::new(&empty, &[0]).unwrap();
        let w = ProductMeasure::uniform(&empty).view_weights(&view);
        assert!(weak_fubini_check(&view, &w, &frac(1, 2)).holds);

        let h = half_graph(4);
        let view = BinaryView::new(&h, &[0]).unwrap();
        let w = ProductMeasure::uniform(&h).view_weights(&view);
        let r = weak_fubini_check(&view, &w, &rational::int(1));
        assert!(r.holds);
        assert_eq!(r.product_mass, frac(10, 16));
        assert_eq!(r.product_mass, r.integrated_mass);
    }

    #[test]
    fn oversized_denominators_are_rejected() {
        let big = |p: usize| {
            let d = (1i64 << 62) - 1;
            Measure::new(p, vec![frac(1, d), frac(d - 1, d)]).unwrap()
        };
        let ms: Vec<Measure> = (0..3).map(big).collect();
        assert!(ProductMeasure::new(&ms).is_err());
        assert!(ProductMeasure::new(&ms[..2]).is_ok());
    }
}
