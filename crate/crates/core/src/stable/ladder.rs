use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::bits::{self, BitSet};
use crate::error::{Error, Result};
use crate::hypergraph::{BinaryView, Hypergraph};

/// Search nodes explored before giving up on improving the ladder.
const NODE_BUDGET: u64 = 20_000_000;

/// Witnesses `a_1..a_d ∈ V_I`, `b_1..b_d ∈ V_{I°}` with `a_i ∈ R_{b_j} ⇔ i ≤ j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderCertificate {
    pub points: Vec<usize>,
    pub a: Vec<Vec<u32>>,
    pub b: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderResult {
    pub length: usize,
    /// The search stopped at `cap`; the true length may be larger.
    pub capped: bool,
    /// The node budget ran out; `length` is a lower bound.
    pub exhausted: bool,
    pub nodes: u64,
    pub certificate: LadderCertificate,
}

pub fn ladder_index(h: &Hypergraph, points: &[usize], cap: usize) -> Result<LadderResult> {
    if cap == 0 {
        return Err(Error::input("cap must be at least 1"));
    }
    let view = BinaryView::new(h, points)?;
    Ok(ladder_view(&view, cap))
}

pub(crate) fn ladder_view(view: &BinaryView, cap: usize) -> LadderResult {
    // Points with equal cofibers (and parameters with equal fibers) are
    // interchangeable and never both appear in a ladder.
    let mut point_reps: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for a in 0..view.n_points() {
        point_reps.entry(bits::key(view.cofiber(a))).or_insert(a);
    }
    let mut param_reps: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for b in 0..view.n_params() {
        param_reps.entry(bits::key(view.fiber(b))).or_insert(b);
    }
    let mut pts: Vec<usize> = point_reps.into_values().collect();
    let mut prs: Vec<usize> = param_reps.into_values().collect();
    pts.sort_unstable();
    prs.sort_unstable();
    let np = pts.len();
    let nq = prs.len();
    let cof: Vec<BitSet> = pts
        .iter()
        .map(|&a| bits::from_indices(nq, (0..nq).filter(|&j| view.related(a, prs[j]))))
        .collect();
    let fib: Vec<BitSet> = prs
        .iter()
        .map(|&b| bits::from_indices(np, (0..np).filter(|&i| view.related(pts[i], b))))
        .collect();

    let mut search = Search {
        cof: &cof,
        fib: &fib,
        cap,
        best: Vec::new(),
        current: Vec::new(),
        nodes: 0,
        exhausted: false,
    };
    search.run(bits::full(np), bits::full(nq));
    let length = search.best.len();
    let certificate = LadderCertificate {
        points: view.point_coords().to_vec(),
        a: search.best.iter().map(|&(a, _)| view.point_tuple(pts[a])).collect(),
        b: search.best.iter().map(|&(_, b)| view.param_tuple(prs[b])).collect(),
    };
    LadderResult {
        length,
        capped: length >= cap,
        exhausted: search.exhausted,
        nodes: search.nodes,
        certificate,
    }
}

struct Search<'a> {
    cof: &'a [BitSet],
    fib: &'a [BitSet],
    cap: usize,
    best: Vec<(usize, usize)>,
    current: Vec<(usize, usize)>,
    nodes: u64,
    exhausted: bool,
}

impl Search<'_> {
    /// `cand_a`: points outside every chosen fiber; `cand_b`: parameters
    /// related to every chosen point.
    fn run(&mut self, cand_a: BitSet, cand_b: BitSet) {
        self.nodes += 1;
        if self.current.len() > self.best.len() {
            self.best = self.current.clone();
        }
        if self.best.len() >= self.cap || self.exhausted {
            return;
        }
        if self.nodes >= NODE_BUDGET {
            self.exhausted = true;
            return;
        }
        let room = cand_a.count_ones(..).min(cand_b.count_ones(..));
        if self.current.len() + room <= self.best.len() {
            return;
        }
        for a in cand_a.ones() {
            let nb = bits::intersection(&cand_b, &self.cof[a]);
            for b in nb.ones() {
                let mut na = cand_a.clone();
                na.difference_with(&self.fib[b]);
                self.current.push((a, b));
                self.run(na, nb.clone());
                self.current.pop();
                if self.best.len() >= self.cap || self.exhausted {
                    return;
                }
            }
        }
    }
}

/// Direct edge lookups for every pair of the certificate.
pub fn verify_ladder(h: &Hypergraph, cert: &LadderCertificate) -> Result<bool> {
    let view = BinaryView::new(h, &cert.points)?;
    if cert.a.len() != cert.b.len() {
        return Ok(false);
    }
    let d = cert.a.len();
    let mut tuple = alloc::vec![0u32; h.k()];
    for i in 0..d {
        for j in 0..d {
            for (&c, &v) in view.point_coords().iter().zip(&cert.a[i]) {
                tuple[c] = v;
            }
            for (&c, &v) in view.param_coords().iter().zip(&cert.b[j]) {
                tuple[c] = v;
            }
            if h.contains(&tuple) != (i <= j) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
