use vcreg_core::rational;
use vcreg_core::stable::{self, StableOptions};

use super::{brute_partition_checks, load};
use crate::cli::StableCommand;
use crate::error::CliError;
use crate::report::RunReport;

pub(super) fn run(cmd: &StableCommand, report: &mut RunReport) -> Result<(), CliError> {
    match cmd {
        StableCommand::Ladder { family, cap } => {
            let points: Vec<String> = family.points.iter().map(usize::to_string).collect();
            report.arg("points", points.join(",")).arg("cap", cap);
            let l = load(&family.io, report)?;
            let res = stable::ladder_index(&l.hypergraph, &family.points, *cap)?;
            let cert = &res.certificate;
            report.check_detail(
                "certificate-valid",
                stable::verify_ladder(&l.hypergraph, cert)?,
                format!("{} rungs", cert.a.len()),
            );
            report.check(
                "certificate-length",
                cert.a.len() == res.length && cert.b.len() == res.length,
            );
            report.output(&res);
        }
        StableCommand::Partition {
            io,
            epsilon,
            depth_cap,
            rounds,
            d_hat,
        } => {
            report
                .arg("epsilon", rational::format(epsilon))
                .arg("depth_cap", depth_cap);
            if let Some(r) = rounds {
                report.arg("rounds", r);
            }
            if let Some(d) = d_hat {
                report.arg("d_hat", d);
            }
            let l = load(io, report)?;
            let opts = StableOptions {
                depth_cap: *depth_cap,
                rounds: *rounds,
                d_hat: *d_hat,
            };
            let out = stable::stable_regular_partition(&l.hypergraph, &l.measures, epsilon, &opts)?;
            report.check_detail(
                "partition-verifier",
                out.report.passed(),
                serde_json::to_string(&out.report.violations).expect("violations serialize"),
            );
            report.check("sigma-empty", out.partition.sigma.is_empty());
            brute_partition_checks(report, &l.hypergraph, &l.measures, &out.partition);
            report.output(&out);
        }
    }
    Ok(())
}
