use vcreg_core::counterexamples::{
    self, DyadicBall, Parity,
};
use vcreg_core::rational::{self, Rational};
use vcreg_core::{Hypergraph, Measure};

use crate::cli::{BallArgs, ConvexityCommand, DyadicCommand, IntegerSetArgs, RodlCommand};
use crate::error::CliError;
use crate::format;
use crate::oracle;
use crate::report::RunReport;

/// Ball unions with at most this many leaves are rechecked pair by pair.
const BRUTE_LEAVES: u128 = 1 << 11;
/// Integer sets up to this size are rechecked triple by triple.
const BRUTE_POINTS: usize = 400;

fn balls(args: &BallArgs, report: &mut RunReport) -> Result<Vec<DyadicBall>, CliError> {
    report
        .arg("depth", args.depth)
        .arg("parity", format!("{:?}", args.parity).to_lowercase())
        .arg("prefix", args.prefixes.join(","));
    if args.prefixes.is_empty() {
        return Ok(vec![DyadicBall::root()]);
    }
    Ok(args
        .prefixes
        .iter()
        .map(|p| DyadicBall::parse(p))
        .collect::<Result<_, _>>()?)
}

fn pair_recheck(report: &mut RunReport, a: &[DyadicBall], depth: usize, parity: Parity, pairs: u128, edges: u128) {
    let leaves: u128 = a.iter().map(|b| b.leaf_count(depth)).sum();
    if leaves <= BRUTE_LEAVES {
        let (p, e) = oracle::dyadic_pairs(a, depth, parity);
        report.check_detail(
            "brute-leaf-pairs",
            p == pairs && e == edges,
            format!("enumerated {e}/{p}"),
        );
    }
}

pub(super) fn dyadic(cmd: &DyadicCommand, report: &mut RunReport) -> Result<(), CliError> {
    match cmd {
        DyadicCommand::Density { balls: args } => {
            let a = balls(args, report)?;
            let parity = args.parity.into();
            let d = counterexamples::odd_split_density(&a, args.depth, parity)?;
            let level_sum: u128 = d.levels.iter().map(|l| l.pairs).sum();
            let level_edges: u128 = d.levels.iter().filter(|l| l.edge).map(|l| l.pairs).sum();
            report.check(
                "level-counts",
                level_sum == d.pairs
                    && level_edges == d.edge_pairs
                    && d.density == Rational::new(d.edge_pairs.into(), d.pairs.into()),
            );
            pair_recheck(report, &a, args.depth, parity, d.pairs, d.edge_pairs);
            report.output(&d);
        }
        DyadicCommand::Report { depth, parity } => {
            report
                .arg("depth", depth)
                .arg("parity", format!("{parity:?}").to_lowercase());
            let rows = counterexamples::ball_parity_report(*depth, (*parity).into())?;
            let off: Vec<usize> = rows.iter().filter(|r| !r.within).map(|r| r.prefix_len).collect();
            report.check_detail(
                "rows-within-limits",
                off.is_empty(),
                format!("prefix lengths off: {off:?}"),
            );
            report.output(&rows);
        }
        DyadicCommand::Bound {
            balls: args,
            ball,
            seed,
            max_balls,
        } => {
            let parity: Parity = args.parity.into();
            let (a, b) = match seed {
                Some(s) => {
                    report
                        .arg("depth", args.depth)
                        .arg("seed", s)
                        .arg("max_balls", max_balls);
                    counterexamples::random_ball_union(args.depth, *s, *max_balls)?
                }
                None => {
                    let a = balls(args, report)?;
                    let b = match ball {
                        Some(p) => DyadicBall::parse(p)?,
                        None => a[0].clone(),
                    };
                    report.arg("ball", b.to_string());
                    (a, b)
                }
            };
            let res = counterexamples::anti_homogeneity_bound_check(&a, &b, args.depth, parity)?;
            report.check_detail(
                "anti-homogeneity",
                res.verdict,
                format!(
                    "{} ≤ {}",
                    rational::format(&res.pair_mass),
                    rational::format(&res.bound)
                ),
            );
            let d = counterexamples::odd_split_density(&a, args.depth, parity)?;
            pair_recheck(report, &a, args.depth, parity, d.pairs, d.edge_pairs);
            report.output(&serde_json::json!({ "a": a, "b": b, "check": res }));
        }
    }
    Ok(())
}

fn integer_set(args: &IntegerSetArgs, report: &mut RunReport) -> Result<(i64, i64), CliError> {
    let (lo, hi) = match args.interval.as_deref() {
        Some([lo, hi]) => (*lo, *hi),
        Some(_) => return Err(CliError::Usage("--interval takes lo,hi".into())),
        None => (1, args.n),
    };
    report.arg("n", args.n).arg("interval", format!("{lo},{hi}"));
    Ok((lo, hi))
}

pub(super) fn convexity(cmd: &ConvexityCommand, report: &mut RunReport) -> Result<(), CliError> {
    match cmd {
        ConvexityCommand::Density { set } => {
            let (lo, hi) = integer_set(set, report)?;
            let d = counterexamples::convexity_density_interval(set.n, lo, hi)?;
            report.check_detail(
                "formula",
                d.matches_formula,
                format!("1/2 + {}/(2·{})", d.ap, d.triples),
            );
            let c: Vec<i64> = (lo..=hi).collect();
            if c.len() <= BRUTE_POINTS {
                let (e, t) = oracle::convexity_triples(&c);
                report.check_detail(
                    "brute-triples",
                    e == d.edges && t == d.triples,
                    format!("enumerated {e}/{t}"),
                );
            }
            report.output(&d);
        }
        ConvexityCommand::Involution { set } => {
            let (lo, hi) = integer_set(set, report)?;
            if lo < 1 || hi > set.n || lo > hi {
                return Err(CliError::Input(format!("[{lo}, {hi}] is not an interval of 1..={}", set.n)));
            }
            let c: Vec<i64> = (lo..=hi).collect();
            let r = counterexamples::reflection_involution_check(&c)?;
            report.check_detail("reflection", r.holds, format!("{} triples", r.triples_checked));
            report.output(&r);
        }
    }
    Ok(())
}

/// Weighted edge density of `set` over ordered pairs of distinct vertices.
fn distinct_pair_density(h: &Hypergraph, m: &Measure, set: &[u32]) -> Option<Rational> {
    let mut mass = rational::int(0);
    let mut edge = rational::int(0);
    for &x in set {
        for &y in set {
            if x == y {
                continue;
            }
            let w = m.weight(x as usize) * m.weight(y as usize);
            if h.contains(&[x, y]) {
                edge += w.clone();
            }
            mass += w;
        }
    }
    (mass != rational::int(0)).then(|| edge / mass)
}

pub(super) fn rodl(cmd: &RodlCommand, report: &mut RunReport) -> Result<(), CliError> {
    let RodlCommand::Search {
        input,
        measure,
        depth,
        parity,
        eps,
        m,
        budget,
        seed,
    } = cmd;
    report
        .arg("eps", rational::format(eps))
        .arg("m", m)
        .arg("budget", budget)
        .arg("seed", seed);
    let (h, mu) = match (input, depth) {
        (Some(path), None) => {
            let l = format::load(path, measure.as_deref())?;
            report.file(path)?;
            if let Some(mp) = measure {
                report.file(mp)?;
            }
            let mu = l.measures[0].clone();
            (l.hypergraph, mu)
        }
        (None, Some(d)) => {
            report
                .arg("depth", d)
                .arg("parity", format!("{parity:?}").to_lowercase());
            let h = counterexamples::dyadic_graph(*d, (*parity).into())?;
            let mu = Measure::uniform(0, h.part_size(0));
            (h, mu)
        }
        _ => return Err(CliError::Usage("give exactly one of --in and --depth".into())),
    };
    let search = counterexamples::definable_homogeneous_search(&h, &mu, eps, *m, *budget, *seed)?;
    report.check("budget-respected", search.tuples_examined <= search.budget);
    match &search.found {
        Some(w) => {
            let d = distinct_pair_density(&h, &mu, &w.set);
            let one = rational::one();
            let ok = d.as_ref().is_some_and(|d| {
                *d == w.density && (*d <= *eps || *d >= &one - eps)
            });
            report.check_detail(
                "witness-homogeneous",
                ok,
                format!("density {}", d.as_ref().map(rational::format).unwrap_or_default()),
            );
        }
        None => {
            report.check_detail("witness-homogeneous", true, "no homogeneous set found");
        }
    }
    let balls = match depth {
        Some(d) if *d >= 2 => Some(counterexamples::dyadic_ball_search(*d, eps, (*parity).into(), 2)?),
        _ => None,
    };
    report.output(&serde_json::json!({ "search": search, "balls": balls }));
    Ok(())
}
