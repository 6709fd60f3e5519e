//! Seeded generators for relations with known structure.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`, sampled through `rand` 0.8 `gen_range`; both are
//! platform independent, so an instance is a pure function of its spec.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::counterexamples::{dyadic_graph, Parity};
use crate::error::{Error, Result};
use crate::hypergraph::{BinaryView, Hypergraph};
use crate::measure::Measure;
use crate::stable::{ladder_index, LadderResult};
use crate::vc::{vc_dimension_budgeted, SetFamily, VcDimension, DEFAULT_VC_CAP, VC_WORK_BUDGET};

pub const DEFAULT_LADDER_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    /// Points `0..n` against interval parameters; the first four parameters
    /// shatter `{0, 1}`.
    IntervalGraph,
    /// `a ≤ b` on `n × n`, optionally with both sides shuffled.
    HalfGraph,
    /// `n × n` split into `blocks` contiguous blocks, edges inside blocks.
    BlockUnion,
    /// `x_1 ≤ x_2 ≤ … ≤ x_k` on `n^k`.
    Staircase,
    /// Every parameter's fiber is a union of at most `cap / 2` intervals.
    RandomVcCapped,
    /// The odd-split graph on the `2^depth` leaves of the binary tree.
    DyadicExport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    /// Vertices per part (points for interval and random kinds).
    pub n: usize,
    /// Parameter count for interval and random kinds; defaults to `n`.
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub blocks: Option<usize>,
    #[serde(default)]
    pub cap: Option<usize>,
    #[serde(default)]
    pub shuffle: bool,
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(default)]
    pub parity: Parity,
    /// Cap for the ladder measurement; 0 skips it.
    #[serde(default = "default_ladder_cap")]
    pub ladder_cap: usize,
}

fn default_k() -> usize {
    2
}

fn default_ladder_cap() -> usize {
    DEFAULT_LADDER_CAP
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, n: usize, seed: u64) -> Self {
        GeneratorSpec {
            kind,
            n,
            m: None,
            k: 2,
            seed,
            blocks: None,
            cap: None,
            shuffle: false,
            depth: None,
            parity: Parity::Odd,
            ladder_cap: DEFAULT_LADDER_CAP,
        }
    }
}

/// Parameters measured on part 0 of the generated relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measured {
    /// VC dimension of the fibers `R_b ⊆ V_0` (a lower bound if `capped`).
    pub vc: VcDimension,
    /// VC dimension of the dual family.
    pub vc_dual: VcDimension,
    pub ladder: Option<LadderResult>,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub spec: GeneratorSpec,
    pub hypergraph: Hypergraph,
    pub measures: Vec<Measure>,
    pub measured: Measured,
}

pub fn generate(spec: &GeneratorSpec) -> Result<Instance> {
    let h = build(spec)?;
    let view = BinaryView::new(&h, &[0])?;
    let vc = vc_dimension_budgeted(&SetFamily::fibers(&view), DEFAULT_VC_CAP, VC_WORK_BUDGET);
    let vc_dual =
        vc_dimension_budgeted(&SetFamily::fibers(&view.transpose()), DEFAULT_VC_CAP, VC_WORK_BUDGET);
    let ladder = if spec.ladder_cap > 0 {
        Some(ladder_index(&h, &[0], spec.ladder_cap)?)
    } else {
        None
    };
    Ok(Instance {
        spec: spec.clone(),
        measures: Measure::uniform_for(&h),
        hypergraph: h,
        measured: Measured {
            vc,
            vc_dual,
            ladder,
        },
    })
}

fn build(spec: &GeneratorSpec) -> Result<Hypergraph> {
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let need = |ok: bool, msg: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::input(format!("{:?}: {}", spec.kind, msg)))
        }
    };
    match spec.kind {
        GeneratorKind::IntervalGraph => {
            let m = spec.m.unwrap_or(n);
            need(n >= 2 && m >= 4, "needs n ≥ 2 points and m ≥ 4 parameters")?;
            let mut intervals: Vec<Option<(u32, u32)>> =
                vec![None, Some((0, 0)), Some((1, 1)), Some((0, 1))];
            while intervals.len() < m {
                let a = rng.gen_range(0..n as u32);
                let b = rng.gen_range(0..n as u32);
                intervals.push(Some((a.min(b), a.max(b))));
            }
            Hypergraph::from_predicate(vec![n, m], false, |t| {
                intervals[t[1] as usize].is_some_and(|(lo, hi)| lo <= t[0] && t[0] <= hi)
            })
        }
        GeneratorKind::HalfGraph => {
            need(n >= 1, "needs n ≥ 1")?;
            let mut left: Vec<u32> = (0..n as u32).collect();
            let mut right = left.clone();
            if spec.shuffle {
                left.shuffle(&mut rng);
                right.shuffle(&mut rng);
            }
            Hypergraph::from_predicate(vec![n, n], false, |t| {
                left[t[0] as usize] <= right[t[1] as usize]
            })
        }
        GeneratorKind::BlockUnion => {
            let blocks = spec.blocks.unwrap_or(2);
            need(blocks >= 1 && blocks <= n, "needs 1 ≤ blocks ≤ n")?;
            let mut label: Vec<usize> = (0..n).map(|v| v * blocks / n).collect();
            let mut other = label.clone();
            if spec.shuffle {
                label.shuffle(&mut rng);
                other.shuffle(&mut rng);
            }
            Hypergraph::from_predicate(vec![n, n], false, |t| {
                label[t[0] as usize] == other[t[1] as usize]
            })
        }
        GeneratorKind::Staircase => {
            need(n >= 1 && spec.k >= 1, "needs n ≥ 1 and k ≥ 1")?;
            Hypergraph::from_predicate(vec![n; spec.k], false, |t| {
                t.windows(2).all(|w| w[0] <= w[1])
            })
        }
        GeneratorKind::RandomVcCapped => {
            let m = spec.m.unwrap_or(n);
            let cap = spec.cap.unwrap_or(2);
            need(n >= 1 && m >= 1 && cap >= 2, "needs n, m ≥ 1 and cap ≥ 2")?;
            let per = cap / 2;
            let fibers: Vec<Vec<(u32, u32)>> = (0..m)
                .map(|_| {
                    let count = rng.gen_range(0..=per);
                    (0..count)
                        .map(|_| {
                            let a = rng.gen_range(0..n as u32);
                            let b = rng.gen_range(0..n as u32);
                            (a.min(b), a.max(b))
                        })
                        .collect()
                })
                .collect();
            Hypergraph::from_predicate(vec![n, m], false, |t| {
                fibers[t[1] as usize]
                    .iter()
                    .any(|&(lo, hi)| lo <= t[0] && t[0] <= hi)
            })
        }
        GeneratorKind::DyadicExport => {
            let depth = spec.depth.unwrap_or(4);
            dyadic_graph(depth, spec.parity)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_graph_parameters() {
        let inst = generate(&GeneratorSpec::new(GeneratorKind::HalfGraph, 8, 0)).unwrap();
        assert_eq!(inst.measured.vc.value, 1);
        assert_eq!(inst.measured.ladder.unwrap().length, 8);
    }

    #[test]
    fn block_union_is_one_stable() {
        let mut spec = GeneratorSpec::new(GeneratorKind::BlockUnion, 12, 0);
        spec.blocks = Some(3);
        let inst = generate(&spec).unwrap();
        assert_eq!(inst.measured.ladder.unwrap().length, 1);
    }

    #[test]
    fn staircase_edge_count() {
        let mut spec = GeneratorSpec::new(GeneratorKind::Staircase, 4, 0);
        spec.k = 3;
        assert_eq!(generate(&spec).unwrap().hypergraph.edge_count(), 20);
    }

    #[test]
    fn interval_graph_has_vc_two() {
        for seed in 0..5 {
            let inst = generate(&GeneratorSpec::new(GeneratorKind::IntervalGraph, 12, seed)).unwrap();
            assert_eq!(inst.measured.vc.value, 2);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let mut spec = GeneratorSpec::new(GeneratorKind::RandomVcCapped, 20, 42);
        spec.cap = Some(4);
        let a = generate(&spec).unwrap().hypergraph;
        let b = generate(&spec).unwrap().hypergraph;
        assert_eq!(a, b);
    }

    #[test]
    fn bad_block_count() {
        let mut spec = GeneratorSpec::new(GeneratorKind::BlockUnion, 4, 0);
        spec.blocks = Some(5);
        assert!(generate(&spec).is_err());
    }
}
