use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::rect::{rect_with_measure, union_membership, RectApprox};
use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::hypergraph::{BinaryView, Hypergraph, Tuples};
use crate::measure::{Measure, ProductMeasure};
use crate::rational::{self, Rational};
use crate::vc::{self, SetFamily};

/// Largest parameter side on which the dual VC dimension is measured for the
/// bound table.
const DUAL_VC_LIMIT: usize = 4096;

/// Label of a non-exceptional box.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoxLabel {
    /// One class index per part.
    pub cell: Vec<usize>,
    pub label: u8,
}

/// Partitions `P_1, …, P_k` with exceptional boxes `Σ` and 0/1 labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularPartition {
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    /// `classes[i]` partitions part `i`; classes are sorted vertex lists
    /// ordered by least vertex.
    pub classes: Vec<Vec<Vec<u32>>>,
    /// Exceptional cells, lexicographic.
    pub sigma: Vec<Vec<usize>>,
    pub labels: Vec<BoxLabel>,
    /// Defining parameters per part: tuples over `[k] \ {i}` whose fibers
    /// cut part `i` into unions of classes.
    pub params: Vec<Vec<Vec<u32>>>,
    pub uniform: bool,
}

impl RegularPartition {
    pub fn k(&self) -> usize {
        self.classes.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    pub fn box_count(&self) -> usize {
        self.classes.iter().map(Vec::len).product()
    }
}

/// Mass statistics of one cell, in product-measure ticks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CellStat {
    pub mass: u128,
    pub edge: u128,
    /// Mass of the auxiliary set inside the cell.
    pub extra: u128,
    /// Mass of `extra Δ E` inside the cell.
    pub extra_sym: u128,
}

/// Row-major cell statistics for a class assignment (`assignment[i][v]` is
/// the class of vertex `v` in part `i`).
pub fn cell_stats(
    h: &Hypergraph,
    pm: &ProductMeasure,
    assignment: &[Vec<usize>],
    extra: Option<&BitSet>,
) -> Vec<CellStat> {
    let counts: Vec<usize> = assignment
        .iter()
        .map(|a| a.iter().max().map_or(0, |m| m + 1))
        .collect();
    let mut stats = vec![CellStat::default(); counts.iter().product()];
    let member = h.membership();
    for (idx, t) in Tuples::new(h.part_sizes()).enumerate() {
        let mut cell = 0usize;
        for (i, &v) in t.iter().enumerate() {
            cell = cell * counts[i] + assignment[i][v as usize];
        }
        let w = pm.tuple_ticks(&t);
        let s = &mut stats[cell];
        s.mass += w;
        let e = member.contains(idx);
        if e {
            s.edge += w;
        }
        if let Some(x) = extra {
            let in_x = x.contains(idx);
            if in_x {
                s.extra += w;
            }
            if in_x != e {
                s.extra_sym += w;
            }
        }
    }
    stats
}

pub(crate) fn cell_of(index: usize, counts: &[usize]) -> Vec<usize> {
    let mut out = vec![0; counts.len()];
    let mut idx = index;
    for i in (0..counts.len()).rev() {
        out[i] = idx % counts[i];
        idx /= counts[i];
    }
    out
}

pub(crate) fn cell_index(cell: &[usize], counts: &[usize]) -> usize {
    cell.iter().zip(counts).fold(0, |acc, (&c, &n)| acc * n + c)
}

/// A partition together with how it was obtained.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionOutcome {
    pub partition: RegularPartition,
    pub rect: RectApprox,
    pub report: VerificationReport,
    pub bounds: Vec<BoundRow>,
}

/// A realized size next to the bound it is expected to respect.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRow {
    pub name: String,
    pub realized: u128,
    pub bound: Option<u128>,
    pub within: Option<bool>,
}

impl BoundRow {
    fn new(name: String, realized: u128, bound: Option<u128>) -> Self {
        BoundRow {
            name,
            realized,
            bound,
            within: bound.map(|b| realized <= b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    NotAPartition {
        part: usize,
        detail: String,
    },
    BadSigmaCell {
        cell: Vec<usize>,
    },
    SigmaMass {
        #[serde(with = "rational::serde_str")]
        mass: Rational,
    },
    NotHomogeneous {
        cell: Vec<usize>,
        #[serde(with = "rational::serde_str")]
        edge_density: Rational,
    },
    LabelMismatch {
        cell: Vec<usize>,
        label: u8,
        #[serde(with = "rational::serde_str")]
        edge_density: Rational,
    },
    NotDefinable {
        part: usize,
        detail: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    #[serde(with = "rational::serde_str")]
    pub sigma_mass: Rational,
    pub boxes_checked: usize,
    pub zero_measure_boxes: usize,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every property of a claimed partition exactly. Malformed measures
/// are errors; everything about the partition itself lands in the report.
pub fn verify_regular_partition(
    h: &Hypergraph,
    measures: &[Measure],
    p: &RegularPartition,
) -> Result<VerificationReport> {
    let pm = ProductMeasure::for_hypergraph(h, measures)?;
    Ok(verify_with_measure(h, &pm, p))
}

pub(crate) fn verify_with_measure(
    h: &Hypergraph,
    pm: &ProductMeasure,
    p: &RegularPartition,
) -> VerificationReport {
    let mut report = VerificationReport {
        epsilon: p.epsilon.clone(),
        sigma_mass: rational::int(0),
        boxes_checked: 0,
        zero_measure_boxes: 0,
        violations: Vec::new(),
    };
    let k = h.k();
    if p.classes.len() != k {
        report.violations.push(Violation::NotAPartition {
            part: 0,
            detail: format!("{} class lists for {} parts", p.classes.len(), k),
        });
        return report;
    }
    let mut assignment = Vec::with_capacity(k);
    for (i, classes) in p.classes.iter().enumerate() {
        match assign(h.part_size(i), classes) {
            Ok(a) => assignment.push(a),
            Err(detail) => report.violations.push(Violation::NotAPartition { part: i, detail }),
        }
    }
    if !report.violations.is_empty() {
        return report;
    }
    let counts = p.class_counts();
    let stats = cell_stats(h, pm, &assignment, None);

    let mut in_sigma = vec![false; stats.len()];
    let mut sigma_ticks = 0u128;
    for cell in &p.sigma {
        let ok = cell.len() == k && cell.iter().zip(&counts).all(|(&c, &n)| c < n);
        if !ok {
            report.violations.push(Violation::BadSigmaCell { cell: cell.clone() });
            continue;
        }
        let idx = cell_index(cell, &counts);
        if !in_sigma[idx] {
            in_sigma[idx] = true;
            sigma_ticks += stats[idx].mass;
        }
    }
    report.sigma_mass = pm.to_rational(sigma_ticks);
    if report.sigma_mass > p.epsilon {
        report.violations.push(Violation::SigmaMass {
            mass: report.sigma_mass.clone(),
        });
    }

    let mut given: BTreeMap<usize, u8> = BTreeMap::new();
    for l in &p.labels {
        let ok = l.cell.len() == k && l.cell.iter().zip(&counts).all(|(&c, &n)| c < n);
        if ok {
            given.insert(cell_index(&l.cell, &counts), l.label);
        }
    }
    for (idx, s) in stats.iter().enumerate() {
        if in_sigma[idx] {
            continue;
        }
        if s.mass == 0 {
            report.zero_measure_boxes += 1;
            continue;
        }
        report.boxes_checked += 1;
        let empty_ok = rational::lt_scaled(s.edge, &p.epsilon, s.mass);
        let full_ok = rational::lt_scaled(s.mass - s.edge, &p.epsilon, s.mass);
        let density = rational::from_ticks(s.edge, s.mass);
        match given.get(&idx) {
            Some(&label) if (label == 1 && !full_ok) || (label == 0 && !empty_ok) || label > 1 => {
                let cell = cell_of(idx, &counts);
                if empty_ok || full_ok {
                    report.violations.push(Violation::LabelMismatch {
                        cell,
                        label,
                        edge_density: density,
                    });
                } else {
                    report.violations.push(Violation::NotHomogeneous {
                        cell,
                        edge_density: density,
                    });
                }
            }
            Some(_) => {}
            None => {
                if !empty_ok && !full_ok {
                    report.violations.push(Violation::NotHomogeneous {
                        cell: cell_of(idx, &counts),
                        edge_density: density,
                    });
                }
            }
        }
    }

    if p.params.len() != k {
        report.violations.push(Violation::NotDefinable {
            part: 0,
            detail: format!("{} parameter lists for {} parts", p.params.len(), k),
        });
        return report;
    }
    for i in 0..k {
        let weights = &pm.part(i).ticks;
        if let Err(detail) = check_definable(h, i, &assignment[i], weights, &p.params[i]) {
            report.violations.push(Violation::NotDefinable { part: i, detail });
        }
    }
    report
}

fn assign(n: usize, classes: &[Vec<u32>]) -> core::result::Result<Vec<usize>, String> {
    let mut out = vec![usize::MAX; n];
    for (c, class) in classes.iter().enumerate() {
        if class.is_empty() {
            return Err(format!("class {} is empty", c));
        }
        for &v in class {
            let v = v as usize;
            if v >= n {
                return Err(format!("vertex {} out of range", v));
            }
            if out[v] != usize::MAX {
                return Err(format!("vertex {} in two classes", v));
            }
            out[v] = c;
        }
    }
    if let Some(v) = out.iter().position(|&c| c == usize::MAX) {
        return Err(format!("vertex {} is in no class", v));
    }
    Ok(out)
}

/// Every class must be a union of atoms over the fibers of `params`, up to
/// vertices of weight zero (those are folded into arbitrary classes).
fn check_definable(
    h: &Hypergraph,
    part: usize,
    assignment: &[usize],
    weights: &[u128],
    params: &[Vec<u32>],
) -> core::result::Result<(), String> {
    let view = BinaryView::new(h, &[part]).map_err(|e| format!("{}", e))?;
    let idx = param_indices(h, part, &view, params)?;
    let mut seen: BTreeMap<Vec<bool>, usize> = BTreeMap::new();
    for (v, &c) in assignment.iter().enumerate() {
        if weights[v] == 0 {
            continue;
        }
        let pattern: Vec<bool> = idx.iter().map(|&b| view.related(v, b)).collect();
        let prev = *seen.entry(pattern).or_insert(c);
        if prev != c {
            return Err(format!(
                "vertex {} shares its parameter pattern with class {} but lies in class {}",
                v, prev, c
            ));
        }
    }
    Ok(())
}

fn param_indices(
    h: &Hypergraph,
    part: usize,
    view: &BinaryView,
    params: &[Vec<u32>],
) -> core::result::Result<Vec<usize>, String> {
    let others: Vec<usize> = (0..h.k()).filter(|&j| j != part).collect();
    params
        .iter()
        .map(|p| {
            let ok = p.len() == others.len()
                && p.iter().zip(&others).all(|(&v, &j)| (v as usize) < h.part_size(j));
            if ok {
                Ok(view.param_index(p))
            } else {
                Err(format!("malformed parameter {:?}", p))
            }
        })
        .collect()
}

/// Classes of each part from a per-vertex fingerprint, ordered by least
/// vertex, with zero-measure classes folded into the first class of positive
/// measure.
fn classes_from_keys<K: Ord>(keys: Vec<K>, weights: &[u128]) -> Vec<Vec<u32>> {
    let mut groups: BTreeMap<K, Vec<u32>> = BTreeMap::new();
    for (v, key) in keys.into_iter().enumerate() {
        groups.entry(key).or_default().push(v as u32);
    }
    let mut classes: Vec<Vec<u32>> = groups.into_values().collect();
    classes.sort();
    let mass = |c: &Vec<u32>| c.iter().map(|&v| weights[v as usize]).sum::<u128>();
    if let Some(target) = classes.iter().position(|c| mass(c) > 0) {
        let mut merged = Vec::new();
        let mut keep = Vec::new();
        for (i, c) in classes.into_iter().enumerate() {
            if i != target && c.iter().all(|&v| weights[v as usize] == 0) {
                merged.extend(c);
            } else {
                keep.push(c);
            }
        }
        let target = keep
            .iter()
            .position(|c| mass(c) > 0)
            .expect("target class kept");
        keep[target].extend(merged);
        keep[target].sort_unstable();
        keep.sort();
        classes = keep;
    }
    classes
}

fn assemble(
    h: &Hypergraph,
    pm: &ProductMeasure,
    classes: Vec<Vec<Vec<u32>>>,
    a: &BitSet,
    eps: &Rational,
    params: Vec<Vec<Vec<u32>>>,
    uniform: bool,
) -> Result<RegularPartition> {
    let assignment: Vec<Vec<usize>> = classes
        .iter()
        .enumerate()
        .map(|(i, cs)| assign(h.part_size(i), cs).map_err(Error::internal))
        .collect::<Result<_>>()?;
    let counts: Vec<usize> = classes.iter().map(Vec::len).collect();
    let stats = cell_stats(h, pm, &assignment, Some(a));
    let mut sigma = Vec::new();
    let mut labels = Vec::new();
    for (idx, s) in stats.iter().enumerate() {
        if s.mass == 0 {
            continue;
        }
        let cell = cell_of(idx, &counts);
        if !rational::lt_scaled(s.extra_sym, eps, s.mass) {
            sigma.push(cell);
        } else if s.extra == s.mass {
            labels.push(BoxLabel { cell, label: 1 });
        } else if s.extra == 0 {
            labels.push(BoxLabel { cell, label: 0 });
        } else {
            return Err(Error::internal(format!(
                "approximating set is not compatible with cell {:?}",
                cell
            )));
        }
    }
    Ok(RegularPartition {
        epsilon: eps.clone(),
        classes,
        sigma,
        labels,
        params,
        uniform,
    })
}

fn check_epsilon(eps: &Rational) -> Result<()> {
    if !rational::is_positive(eps) || *eps >= rational::one() {
        return Err(Error::input("epsilon must lie in (0, 1)"));
    }
    Ok(())
}

/// Regular partition with 0–1 densities, built from a rectangular
/// approximation at `ε²`.
pub fn regular_partition(
    h: &Hypergraph,
    measures: &[Measure],
    eps: &Rational,
) -> Result<PartitionOutcome> {
    check_epsilon(eps)?;
    let pm = ProductMeasure::for_hypergraph(h, measures)?;
    regular_with_measure(h, &pm, eps)
}

pub(crate) fn regular_with_measure(
    h: &Hypergraph,
    pm: &ProductMeasure,
    eps: &Rational,
) -> Result<PartitionOutcome> {
    let k = h.k();
    let rect = rect_with_measure(h, pm, &(eps * eps))?;
    let mut classes = Vec::with_capacity(k);
    for i in 0..k {
        let keys: Vec<Vec<bool>> = (0..h.part_size(i))
            .map(|v| {
                rect.boxes
                    .iter()
                    .map(|b| b.sides[i].binary_search(&(v as u32)).is_ok())
                    .collect()
            })
            .collect();
        classes.push(classes_from_keys(keys, &pm.part(i).ticks));
    }
    let a = union_membership(h, &rect.boxes);
    let partition = assemble(h, pm, classes, &a, eps, rect.params.clone(), false)?;
    finish(h, pm, partition, rect)
}

/// Uniform version for symmetric relations: one partition of `V` used on
/// every coordinate.
pub fn uniform_regular_partition(
    h: &Hypergraph,
    measure: &Measure,
    eps: &Rational,
) -> Result<PartitionOutcome> {
    check_epsilon(eps)?;
    if !h.is_symmetric() {
        return Err(Error::Precondition(
            "uniform partition needs a symmetric relation".into(),
        ));
    }
    let measures: Vec<Measure> = (0..h.k())
        .map(|i| Measure::new(i, measure.weights().to_vec()))
        .collect::<Result<_>>()?;
    let pm = ProductMeasure::for_hypergraph(h, &measures)?;
    let rect = rect_with_measure(h, &pm, &(eps * eps))?;
    // By symmetry a parameter for any coordinate is a parameter for
    // coordinate 0; pool them.
    let pooled: BTreeSet<Vec<u32>> = rect.params.iter().flatten().cloned().collect();
    let pooled: Vec<Vec<u32>> = pooled.into_iter().collect();
    let view = BinaryView::new(h, &[0])?;
    let idx = param_indices(h, 0, &view, &pooled).map_err(Error::internal)?;
    let keys: Vec<Vec<bool>> = (0..view.n_points())
        .map(|v| idx.iter().map(|&b| view.related(v, b)).collect())
        .collect();
    let base = classes_from_keys(keys, &pm.part(0).ticks);
    let classes = vec![base; h.k()];
    let a = union_membership(h, &rect.boxes);
    let partition = assemble(
        h,
        &pm,
        classes,
        &a,
        eps,
        vec![pooled; h.k()],
        true,
    )?;
    finish(h, &pm, partition, rect)
}

fn finish(
    h: &Hypergraph,
    pm: &ProductMeasure,
    partition: RegularPartition,
    rect: RectApprox,
) -> Result<PartitionOutcome> {
    let report = verify_with_measure(h, pm, &partition);
    if !report.passed() {
        return Err(Error::internal(format!(
            "constructed partition failed verification: {:?}",
            report.violations
        )));
    }
    let bounds = bound_table(h, &partition, &rect);
    Ok(PartitionOutcome {
        partition,
        rect,
        report,
        bounds,
    })
}

fn bound_table(h: &Hypergraph, p: &RegularPartition, rect: &RectApprox) -> Vec<BoundRow> {
    let mut rows = Vec::new();
    for (j, level) in rect.levels.iter().enumerate() {
        rows.push(BoundRow::new(
            format!("delta_net[{}] (arity {})", j, level.arity),
            level.net_size as u128,
            level.net_bound,
        ));
    }
    rows.push(BoundRow::new(
        "param_norm".into(),
        rect.param_norm as u128,
        None,
    ));
    for i in 0..h.k() {
        let bound = BinaryView::new(h, &[i]).ok().and_then(|view| {
            if view.n_params() > DUAL_VC_LIMIT {
                return None;
            }
            let dual = SetFamily::fibers(&view.transpose());
            let d = vc::vc_dimension_budgeted(&dual, vc::DEFAULT_VC_CAP, vc::VC_WORK_BUDGET);
            if d.capped {
                return None;
            }
            Some(rational::sauer_sum(p.params[i].len() as u64, d.value as u64))
        });
        rows.push(BoundRow::new(
            format!("classes[{}]", i),
            p.classes[i].len() as u128,
            bound,
        ));
    }
    rows.push(BoundRow::new(
        "boxes".into(),
        p.box_count() as u128,
        None,
    ));
    rows
}
