use serde::Deserialize;
use vcreg_core::regularity::{
    self, PartitionOutcome, RegularPartition, VerificationReport,
};
use vcreg_core::rational::{self, Rational};

use super::{brute_partition_checks, class_mass, load, BRUTE_LIMIT};
use crate::cli::RegCommand;
use crate::error::CliError;
use crate::format;
use crate::oracle;
use crate::report::RunReport;

fn verifier_check(report: &mut RunReport, v: &VerificationReport) {
    let detail = if v.passed() {
        format!(
            "Σ mass {}, {} boxes checked",
            rational::format(&v.sigma_mass),
            v.boxes_checked
        )
    } else {
        serde_json::to_string(&v.violations).expect("violations serialize")
    };
    report.check_detail("partition-verifier", v.passed(), detail);
}

fn outcome_checks(report: &mut RunReport, outcome: &PartitionOutcome, eps: &Rational) {
    verifier_check(report, &outcome.report);
    report.check_detail(
        "rect-error",
        outcome.rect.error < eps * eps,
        format!("μ(R Δ A) = {}", rational::format(&outcome.rect.error)),
    );
    for row in &outcome.bounds {
        if let Some(within) = row.within {
            report.check_detail(
                &format!("bound:{}", row.name),
                within,
                format!("{} ≤ {}", row.realized, row.bound.unwrap_or_default()),
            );
        }
    }
}

pub(super) fn run(cmd: &RegCommand, report: &mut RunReport) -> Result<(), CliError> {
    match cmd {
        RegCommand::Partition {
            io,
            epsilon,
            uniform,
            seed,
        } => {
            report
                .arg("epsilon", rational::format(epsilon))
                .arg("uniform", uniform)
                .arg("seed", seed);
            let l = load(io, report)?;
            let outcome = if *uniform {
                regularity::uniform_regular_partition(&l.hypergraph, &l.measures[0], epsilon)?
            } else {
                regularity::regular_partition(&l.hypergraph, &l.measures, epsilon)?
            };
            outcome_checks(report, &outcome, epsilon);
            brute_partition_checks(report, &l.hypergraph, &l.measures, &outcome.partition);
            report.output(&outcome);
        }
        RegCommand::Verify { io, partition } => {
            let l = load(io, report)?;
            let v = format::read_value(partition)?;
            report.file(partition)?;
            let inner = v
                .get("partition")
                .or_else(|| v.get("outputs").and_then(|o| o.get("partition")))
                .unwrap_or(&v);
            let p = RegularPartition::deserialize(inner).map_err(|e| {
                CliError::Input(format!("{}: {}", partition.display(), e))
            })?;
            report.arg("epsilon", rational::format(&p.epsilon));
            let vr = regularity::verify_regular_partition(&l.hypergraph, &l.measures, &p)?;
            verifier_check(report, &vr);
            brute_partition_checks(report, &l.hypergraph, &l.measures, &p);
            report.output(&vr);
        }
        RegCommand::Rect { io, epsilon } => {
            report.arg("epsilon", rational::format(epsilon));
            let l = load(io, report)?;
            let ra = regularity::rectangular_approximation(&l.hypergraph, &l.measures, epsilon)?;
            report.check_detail(
                "error-below-epsilon",
                ra.error < *epsilon,
                format!("μ(R Δ A) = {}", rational::format(&ra.error)),
            );
            if l.hypergraph.tuple_count() <= BRUTE_LIMIT {
                let brute = oracle::symmetric_difference_mass(&l.hypergraph, &l.measures, &ra.boxes);
                report.check_detail(
                    "brute-error",
                    brute == ra.error,
                    format!("enumerated {}", rational::format(&brute)),
                );
            }
            report.output(&ra);
        }
        RegCommand::EhBox { io, alpha, epsilon } => {
            report
                .arg("alpha", rational::format(alpha))
                .arg("epsilon", rational::format(epsilon));
            let l = load(io, report)?;
            let db = regularity::find_dense_box(&l.hypergraph, &l.measures, alpha, epsilon)?;
            verifier_check(report, &db.outcome.report);
            let one = rational::one();
            let density = if l.hypergraph.tuple_count() <= BRUTE_LIMIT {
                oracle::box_density(&l.hypergraph, &l.measures, &db.product_box)
            } else {
                Some(db.density.clone())
            };
            report.check_detail(
                "box-dense",
                density.as_ref().is_some_and(|d| *d > &one - epsilon),
                format!("density {}", density.as_ref().map(rational::format).unwrap_or_default()),
            );
            let sides_ok = db
                .product_box
                .sides
                .iter()
                .zip(&l.measures)
                .all(|(side, m)| class_mass(m, side) > db.delta);
            report.check_detail(
                "sides-heavy",
                sides_ok && db.delta > rational::int(0),
                format!("δ = {}", rational::format(&db.delta)),
            );
            report.output(&db);
        }
    }
    Ok(())
}
