//! One function per subcommand, each returning a filled-in report.

mod counter;
mod gen;
mod reg;
mod stable;
mod vc;

use std::collections::BTreeMap;

use vcreg_core::regularity::RegularPartition;
use vcreg_core::rational::{self, Rational};
use vcreg_core::{Hypergraph, Measure, ProductBox};

use crate::cli::{Command, InputArgs};
use crate::error::CliError;
use crate::format::{self, Loaded};
use crate::oracle;
use crate::report::RunReport;
use crate::selftest;

pub use gen::gen_output;

/// Products up to this many tuples are rechecked by enumeration.
pub const BRUTE_LIMIT: usize = 1 << 20;

pub fn dispatch(cmd: &Command) -> Result<RunReport, CliError> {
    let mut report = RunReport::new(&cmd.name());
    match cmd {
        Command::Vc(c) => vc::run(c, &mut report)?,
        Command::Reg(c) => reg::run(c, &mut report)?,
        Command::Stable(c) => stable::run(c, &mut report)?,
        Command::Dyadic(c) => counter::dyadic(c, &mut report)?,
        Command::Convexity(c) => counter::convexity(c, &mut report)?,
        Command::Rodl(c) => counter::rodl(c, &mut report)?,
        Command::Gen(a) => gen::run(a, &mut report)?,
        Command::Selftest(a) => selftest::run(a, &mut report),
    }
    Ok(report)
}

fn load(io: &InputArgs, report: &mut RunReport) -> Result<Loaded, CliError> {
    let loaded = format::load(&io.input, io.measure.as_deref())?;
    report.file(&io.input)?;
    if let Some(m) = &io.measure {
        report.file(m)?;
    }
    Ok(loaded)
}

fn class_mass(m: &Measure, class: &[u32]) -> Rational {
    m.mass(class.iter().map(|&v| v as usize))
}

fn cell_box(p: &RegularPartition, cell: &[usize]) -> ProductBox {
    ProductBox::new(
        cell.iter()
            .enumerate()
            .map(|(i, &c)| p.classes[i][c].clone())
            .collect(),
    )
}

fn cells(counts: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = counts.iter().product();
    (0..total).map(move |mut idx| {
        let mut cell = vec![0; counts.len()];
        for i in (0..counts.len()).rev() {
            cell[i] = idx % counts[i];
            idx /= counts[i];
        }
        cell
    })
}

/// Recomputes Σ mass and every labelled density by enumeration.
fn brute_partition_checks(
    report: &mut RunReport,
    h: &Hypergraph,
    measures: &[Measure],
    p: &RegularPartition,
) {
    let eps = &p.epsilon;
    let sigma_mass: Rational = p
        .sigma
        .iter()
        .map(|cell| {
            cell.iter()
                .enumerate()
                .map(|(i, &c)| class_mass(&measures[i], &p.classes[i][c]))
                .product::<Rational>()
        })
        .sum();
    report.check_detail(
        "brute-sigma-mass",
        sigma_mass <= *eps,
        format!("Σ mass {} against ε = {}", rational::format(&sigma_mass), rational::format(eps)),
    );
    if h.tuple_count() > BRUTE_LIMIT {
        return;
    }
    let labels: BTreeMap<&[usize], u8> = p.labels.iter().map(|l| (l.cell.as_slice(), l.label)).collect();
    let one = rational::one();
    let mut bad = Vec::new();
    let mut checked = 0usize;
    for cell in cells(&p.class_counts()) {
        if p.sigma.contains(&cell) {
            continue;
        }
        let Some(d) = oracle::box_density(h, measures, &cell_box(p, &cell)) else {
            continue;
        };
        checked += 1;
        let ok = match labels.get(cell.as_slice()) {
            Some(1) => d > &one - eps,
            Some(0) => d < *eps,
            _ => false,
        };
        if !ok {
            bad.push(format!("{:?}: {}", cell, rational::format(&d)));
        }
    }
    let detail = if bad.is_empty() {
        format!("{checked} boxes")
    } else {
        format!("{} of {checked} boxes off: {}", bad.len(), bad.join("; "))
    };
    report.check_detail("brute-0-1-densities", bad.is_empty(), detail);
}
