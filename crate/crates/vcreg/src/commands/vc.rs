use vcreg_core::rational::{self, Rational};
use vcreg_core::vc::{self, SetFamily};
use vcreg_core::{BinaryView, Measure};

use super::load;
use crate::cli::{FamilyArgs, VcCommand};
use crate::error::CliError;
use crate::format::Loaded;
use crate::report::RunReport;

struct Family {
    family: SetFamily,
    /// Measure on the ground set of point tuples.
    measure: Measure,
}

fn family(args: &FamilyArgs, report: &mut RunReport) -> Result<Family, CliError> {
    let Loaded {
        hypergraph: h,
        measures,
        ..
    } = load(&args.io, report)?;
    let points: Vec<String> = args.points.iter().map(usize::to_string).collect();
    report.arg("points", points.join(","));
    let view = BinaryView::new(&h, &args.points)?;
    let weights: Vec<Rational> = (0..view.n_points())
        .map(|a| {
            view.point_tuple(a)
                .iter()
                .zip(view.point_coords())
                .map(|(&v, &c)| measures[c].weight(v as usize).clone())
                .product()
        })
        .collect();
    Ok(Family {
        family: SetFamily::fibers(&view),
        measure: Measure::new(0, weights)?,
    })
}

pub(super) fn run(cmd: &VcCommand, report: &mut RunReport) -> Result<(), CliError> {
    match cmd {
        VcCommand::Dim { family: args, cap } => {
            report.arg("cap", cap);
            let Family { family: f, .. } = family(args, report)?;
            let d = vc::vc_dimension(&f, *cap);
            let ground = f.ground();
            report.output(&serde_json::json!({
                "vc": d,
                "ground": ground,
                "members": f.len(),
            }));
            if d.value <= ground {
                let s = vc::shatter_function(&f, d.value)?;
                report.check_detail(
                    "dimension-shattered",
                    s == 1u64 << d.value,
                    format!("π({}) = {}", d.value, s),
                );
            }
            if !d.capped && d.value < ground {
                let s = vc::shatter_function(&f, d.value + 1)?;
                report.check_detail(
                    "dimension-maximal",
                    s < 1u64 << (d.value + 1),
                    format!("π({}) = {}", d.value + 1, s),
                );
            }
        }
        VcCommand::Shatter { family: args, n } => {
            report.arg("n", n);
            let Family { family: f, .. } = family(args, report)?;
            let s = vc::shatter_function(&f, *n)?;
            let d = vc::vc_dimension(&f, vc::DEFAULT_VC_CAP);
            let sauer = vc::sauer_check(&f, d.value, *n)?;
            report.output(&serde_json::json!({
                "n": n,
                "shatter": s,
                "vc": d,
                "sauer": sauer,
            }));
            report.check("at-most-power-set", *n >= 64 || s <= 1u64 << n);
            report.check_detail(
                "sauer-bound",
                sauer.holds,
                format!("{} ≤ {}", sauer.shatter, sauer.bound),
            );
        }
        VcCommand::Net {
            family: args,
            epsilon,
            strategy,
            seed,
        } => {
            report
                .arg("epsilon", rational::format(epsilon))
                .arg("strategy", format!("{strategy:?}").to_lowercase())
                .arg("seed", seed);
            let Family { family: f, measure } = family(args, report)?;
            let net = vc::epsilon_net(&f, &measure, epsilon, (*strategy).into(), *seed)?;
            // Recheck from the definition: every heavy member meets the net.
            let missed = f
                .members()
                .iter()
                .filter(|m| measure.mass(m.ones()) >= *epsilon)
                .filter(|m| !net.points.iter().any(|&x| m.contains(x)))
                .count();
            report.output(&net);
            report.check("net-certified", net.verified);
            report.check_detail(
                "net-exhaustive",
                missed == 0,
                format!("{missed} heavy members missed"),
            );
        }
    }
    Ok(())
}
