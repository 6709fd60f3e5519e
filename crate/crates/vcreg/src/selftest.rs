//! Worked examples with independently known answers, run by `vcreg selftest`.

use rayon::prelude::*;
use vcreg_core::counterexamples::{self, DyadicBall, Parity};
use vcreg_core::hypergraph::Tuples;
use vcreg_core::instances::{self, GeneratorKind, GeneratorSpec};
use vcreg_core::measure::{self, ProductMeasure};
use vcreg_core::rational::{self, frac, Rational};
use vcreg_core::regularity::{self, RegularPartition};
use vcreg_core::stable::{self, StableOptions};
use vcreg_core::vc::{self, NetStrategy, SetFamily};
use vcreg_core::{BinaryView, Hypergraph, Measure, ProductBox};

use crate::cli::SelftestArgs;
use crate::format;
use crate::oracle;
use crate::report::{Check, RunReport};

type Case = (&'static str, fn() -> Result<(), String>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn half_graph(n: usize) -> Hypergraph {
    Hypergraph::from_predicate(vec![n, n], false, |t| t[0] <= t[1]).unwrap()
}

fn blocks(n: usize, m: usize, k: usize, symmetric: bool) -> Hypergraph {
    Hypergraph::from_predicate(vec![n; k], symmetric, |t| {
        t.iter().all(|&x| x as usize * m / n == t[0] as usize * m / n)
    })
    .unwrap()
}

fn intervals(n: usize) -> SetFamily {
    let mut sets: Vec<Vec<usize>> = vec![vec![]];
    for lo in 0..n {
        for hi in lo..n {
            sets.push((lo..=hi).collect());
        }
    }
    SetFamily::new(n, sets).unwrap()
}

/// Every class of `p` on part `i` lies inside one block of size `n / m`.
fn refines_blocks(p: &RegularPartition, n: usize, m: usize) -> bool {
    p.classes.iter().all(|part| {
        part.iter()
            .all(|c| c.iter().all(|&v| v as usize * m / n == c[0] as usize * m / n))
    })
}

fn fiber_example() -> Result<(), String> {
    let f = half_graph(4).fiber(&[0], &[2]).map_err(e)?;
    ensure!(f.members == vec![vec![0], vec![1], vec![2]], "fiber {:?}", f.members);
    Ok(())
}

fn measure_examples() -> Result<(), String> {
    let h = half_graph(4);
    let ms = Measure::uniform_for(&h);
    let sd = oracle::symmetric_difference_mass(&h, &ms, &[]);
    ensure!(sd == frac(10, 16), "μ(R Δ ∅) = {}", rational::format(&sd));
    let pm = ProductMeasure::for_hypergraph(&h, &ms).map_err(e)?;
    let d = measure::density(&h, &pm, &ProductBox::full(&[4, 4])).map_err(e)?;
    ensure!(d == frac(10, 16), "full-box density {}", rational::format(&d));
    Ok(())
}

fn fubini_example() -> Result<(), String> {
    let spec = {
        let mut s = GeneratorSpec::new(GeneratorKind::RandomVcCapped, 6, 11);
        s.cap = Some(4);
        s
    };
    let h = instances::generate(&spec).map_err(e)?.hypergraph;
    let pm = ProductMeasure::uniform(&h);
    let view = BinaryView::new(&h, &[0]).map_err(e)?;
    let w = pm.view_weights(&view);
    let max = (0..view.n_params())
        .map(|b| Rational::new(view.fiber(b).count_ones(..).into(), 6.into()))
        .max()
        .unwrap();
    let r = measure::weak_fubini_check(&view, &w, &(max + frac(1, 100)));
    ensure!(r.holds, "weak Fubini failed");
    ensure!(r.integrated_mass == r.product_mass, "Fubini sums differ");
    Ok(())
}

fn vc_examples() -> Result<(), String> {
    let power = SetFamily::new(3, (0..8usize).map(|m| (0..3).filter(move |i| m >> i & 1 == 1))).map_err(e)?;
    ensure!(vc::vc_dimension(&power, 8).value == 3, "powerset");
    ensure!(vc::shatter_function(&power, 2).map_err(e)? == 4, "powerset shatter");
    let empty = SetFamily::new(3, [Vec::<usize>::new()]).map_err(e)?;
    ensure!(vc::vc_dimension(&empty, 8).value == 0, "{{∅}}");
    ensure!(vc::vc_dimension(&intervals(6), 8).value == 2, "intervals on 6");
    let iv = intervals(10);
    ensure!(vc::shatter_function(&iv, 3).map_err(e)? == 7, "interval shatter");
    ensure!(vc::sauer_check(&iv, 2, 3).map_err(e)?.holds, "interval Sauer");
    let view = BinaryView::new(&half_graph(8), &[0]).map_err(e)?;
    let s = vc::sauer_check(&SetFamily::fibers(&view), 1, 4).map_err(e)?;
    ensure!(s.holds && s.shatter <= 5, "half-graph Sauer {}", s.shatter);
    Ok(())
}

fn atoms_example() -> Result<(), String> {
    let view = BinaryView::new(&half_graph(4), &[0]).map_err(e)?;
    let c = vc::definable_count_bound(&view, &[0, 1, 2, 3]).map_err(e)?;
    // Four distinct nested fibers over four points cut out four types.
    ensure!(c.atoms == 4 && c.within_bound, "atoms {} bound {}", c.atoms, c.bound);
    Ok(())
}

fn net_example() -> Result<(), String> {
    let f = intervals(20);
    let m = Measure::uniform(0, 20);
    let net = vc::epsilon_net(&f, &m, &frac(1, 4), NetStrategy::Greedy, 0).map_err(e)?;
    ensure!(net.verified, "net not verified");
    ensure!(net.points == vec![4, 9, 14, 19], "net {:?}", net.points);
    Ok(())
}

fn delta_example() -> Result<(), String> {
    let h = half_graph(4);
    let eps = frac(3, 10);
    let dp = regularity::delta_approx_partition(&h, &Measure::uniform_for(&h), &eps, &[0]).map_err(e)?;
    let view = BinaryView::new(&h, &[0]).map_err(e)?;
    for c in &dp.classes {
        for &a in c {
            for &b in c {
                let d = (view.fiber(a) ^ view.fiber(b)).count_ones(..);
                ensure!(Rational::new(d.into(), 4.into()) < eps, "fibers {a}, {b} too far");
            }
        }
    }
    Ok(())
}

fn rect_examples() -> Result<(), String> {
    let cases = [
        (half_graph(4), frac(3, 10)),
        (
            Hypergraph::from_predicate(vec![4, 4, 4], false, |t| t[0] <= t[1] && t[1] <= t[2]).unwrap(),
            frac(1, 2),
        ),
    ];
    for (h, eps) in cases {
        let ms = Measure::uniform_for(&h);
        let ra = regularity::rectangular_approximation(&h, &ms, &eps).map_err(e)?;
        let brute = oracle::symmetric_difference_mass(&h, &ms, &ra.boxes);
        ensure!(brute == ra.error && brute < eps, "error {} vs {}", rational::format(&brute), rational::format(&ra.error));
    }
    Ok(())
}

fn partition_examples() -> Result<(), String> {
    let h = blocks(8, 2, 2, false);
    let out = regularity::regular_partition(&h, &Measure::uniform_for(&h), &frac(1, 10)).map_err(e)?;
    ensure!(out.report.passed() && out.partition.sigma.is_empty(), "two blocks");
    ensure!(refines_blocks(&out.partition, 8, 2), "two blocks not refined");

    let h = half_graph(16);
    let out = regularity::regular_partition(&h, &Measure::uniform_for(&h), &frac(1, 4)).map_err(e)?;
    ensure!(out.report.passed() && out.report.sigma_mass <= frac(1, 4), "half-graph 16");

    let h = blocks(12, 3, 2, true);
    let out = regularity::uniform_regular_partition(&h, &Measure::uniform(0, 12), &frac(1, 8)).map_err(e)?;
    ensure!(out.report.passed() && out.partition.sigma.is_empty(), "three cliques");
    ensure!(refines_blocks(&out.partition, 12, 3), "three cliques not refined");

    let h = blocks(8, 2, 3, true);
    let out = regularity::uniform_regular_partition(&h, &Measure::uniform(0, 8), &frac(1, 4)).map_err(e)?;
    ensure!(out.report.passed(), "same-half 3-relation");
    Ok(())
}

fn adversarial_example() -> Result<(), String> {
    let h = half_graph(4);
    let all: Vec<u32> = (0..4).collect();
    let p = RegularPartition {
        epsilon: frac(1, 10),
        classes: vec![vec![all.clone()], vec![all]],
        sigma: vec![],
        labels: vec![regularity::BoxLabel { cell: vec![0, 0], label: 1 }],
        params: vec![vec![], vec![]],
        uniform: false,
    };
    let r = regularity::verify_regular_partition(&h, &Measure::uniform_for(&h), &p).map_err(e)?;
    ensure!(!r.passed(), "trivial partition accepted");
    Ok(())
}

fn dense_box_examples() -> Result<(), String> {
    let h = blocks(8, 2, 2, false);
    let db = regularity::find_dense_box(&h, &Measure::uniform_for(&h), &frac(2, 5), &frac(1, 10)).map_err(e)?;
    ensure!(db.density == rational::one(), "block density {}", rational::format(&db.density));
    let h = half_graph(16);
    let ms = Measure::uniform_for(&h);
    let db = regularity::find_dense_box(&h, &ms, &frac(1, 2), &frac(1, 4)).map_err(e)?;
    let d = oracle::box_density(&h, &ms, &db.product_box).ok_or("empty box")?;
    ensure!(d > frac(3, 4), "half-graph box density {}", rational::format(&d));
    Ok(())
}

fn goodness_examples() -> Result<(), String> {
    let h = half_graph(10);
    let ms = Measure::uniform_for(&h);
    let all: Vec<Vec<u32>> = (0..10).map(|v| vec![v]).collect();
    let g = stable::good_check(&h, &ms, &[0], &all, &frac(1, 5)).map_err(e)?;
    ensure!(!g.good, "half-graph side reported good");
    ensure!(g.witness_density == Some(frac(1, 2)), "witness density {:?}", g.witness_density);

    let h = blocks(12, 3, 2, false);
    let ms = Measure::uniform_for(&h);
    let eps = frac(1, 8);
    let dp = stable::good_descent_partition(&h, &ms, 0, &eps, 8, None).map_err(e)?;
    for c in &dp.classes {
        ensure!(c.iter().all(|&v| v / 4 == c[0] / 4), "class {:?} crosses blocks", c);
        let a: Vec<Vec<u32>> = c.iter().map(|&v| vec![v]).collect();
        ensure!(stable::good_check(&h, &ms, &[0], &a, &eps).map_err(e)?.good, "class {:?} not good", c);
    }

    let h = half_graph(8);
    let ms = Measure::uniform_for(&h);
    let eps = frac(1, 4);
    let dp = stable::good_descent_partition(&h, &ms, 0, &eps, 8, None).map_err(e)?;
    for c in &dp.classes {
        let a: Vec<Vec<u32>> = c.iter().map(|&v| vec![v]).collect();
        ensure!(stable::good_check(&h, &ms, &[0], &a, &eps).map_err(e)?.good, "class {:?} not good", c);
    }
    Ok(())
}

fn stable_examples() -> Result<(), String> {
    for m in 1..=4 {
        let n = 4 * m;
        let h = blocks(n, m, 2, false);
        let out = stable::stable_regular_partition(&h, &Measure::uniform_for(&h), &frac(1, 8), &StableOptions::default())
            .map_err(e)?;
        ensure!(out.report.passed() && out.partition.sigma.is_empty(), "{m} blocks");
        ensure!(refines_blocks(&out.partition, n, m), "{m} blocks not refined");
    }
    let h = blocks(8, 2, 3, false);
    let out = stable::stable_regular_partition(&h, &Measure::uniform_for(&h), &frac(1, 8), &StableOptions::default())
        .map_err(e)?;
    ensure!(out.partition.class_counts() == vec![2, 2, 2], "counts {:?}", out.partition.class_counts());
    ensure!(out.partition.labels.len() == 8, "{} labels", out.partition.labels.len());

    let h = blocks(8, 2, 2, false);
    let b = ProductBox::new(vec![vec![0, 1, 2, 3]]);
    let g = stable::product_goodness_check(&h, &Measure::uniform_for(&h), 2, &[0, 1, 2, 3], &b, &frac(1, 8))
        .map_err(e)?;
    ensure!(g.holds, "same-block product not good");
    Ok(())
}

fn ladder_examples() -> Result<(), String> {
    let inst = instances::generate(&GeneratorSpec::new(GeneratorKind::HalfGraph, 8, 0)).map_err(e)?;
    ensure!(inst.measured.vc.value == 1, "half-graph VC");
    ensure!(inst.measured.ladder.as_ref().map(|l| l.length) == Some(8), "half-graph ladder");
    let mut spec = GeneratorSpec::new(GeneratorKind::BlockUnion, 12, 0);
    spec.blocks = Some(3);
    let inst = instances::generate(&spec).map_err(e)?;
    ensure!(inst.measured.ladder.as_ref().map(|l| l.length) == Some(1), "block ladder");
    let mut spec = GeneratorSpec::new(GeneratorKind::Staircase, 4, 0);
    spec.k = 3;
    ensure!(instances::generate(&spec).map_err(e)?.hypergraph.edge_count() == 20, "staircase edges");
    Ok(())
}

fn dyadic_examples() -> Result<(), String> {
    let root = [DyadicBall::root()];
    let d = counterexamples::odd_split_density(&root, 4, Parity::Odd).map_err(e)?;
    ensure!(d.pairs == 240 && d.edge_pairs == 80, "L=4 counts {}/{}", d.edge_pairs, d.pairs);
    let levels: Vec<u128> = d.levels.iter().map(|l| l.pairs).collect();
    ensure!(levels == vec![128, 64, 32, 16], "levels {:?}", levels);
    let one = [DyadicBall::parse("1").map_err(e)?];
    let d = counterexamples::odd_split_density(&one, 5, Parity::Odd).map_err(e)?;
    ensure!(d.density == frac(2, 3), "prefix 1 at L=5: {}", rational::format(&d.density));
    for depth in 2..=8 {
        let (p, q) = oracle::dyadic_pairs(&root, depth, Parity::Odd);
        let d = counterexamples::odd_split_density(&root, depth, Parity::Odd).map_err(e)?;
        ensure!(d.pairs == p && d.edge_pairs == q, "L={depth} brute mismatch");
    }
    let rows = counterexamples::ball_parity_report(4, Parity::Odd).map_err(e)?;
    ensure!(rows[0].density == frac(1, 3), "L=4 ℓ=0");
    let rows = counterexamples::ball_parity_report(5, Parity::Odd).map_err(e)?;
    ensure!(rows[1].density == frac(2, 3), "L=5 ℓ=1");

    let halves = [DyadicBall::parse("0").map_err(e)?, DyadicBall::parse("1").map_err(e)?];
    let r = counterexamples::anti_homogeneity_bound_check(&halves, &halves[0], 6, Parity::Odd).map_err(e)?;
    ensure!(r.verdict, "two halves at L=6");
    let r = counterexamples::anti_homogeneity_bound_check(&root, &halves[0], 8, Parity::Odd).map_err(e)?;
    ensure!(r.gamma == frac(1, 2) && r.verdict, "γ = 1/2 at L=8");
    Ok(())
}

fn convexity_examples() -> Result<(), String> {
    ensure!(counterexamples::convexity_density(&[1, 2, 3]).map_err(e)?.density == rational::one(), "{{1,2,3}}");
    ensure!(counterexamples::convexity_density(&[1, 2, 3, 4]).map_err(e)?.density == frac(3, 4), "{{1..4}}");
    for n in 3..=100i64 {
        let c: Vec<i64> = (1..=n).collect();
        let d = counterexamples::convexity_density(&c).map_err(e)?;
        let (edges, triples) = oracle::convexity_triples(&c);
        let ap = ((n - 1) * (n - 1) / 4) as u128;
        let formula = frac(1, 2) + Rational::new(ap.into(), (2 * triples).into());
        ensure!(d.edges == edges && d.density == formula, "N = {n}");
    }
    for c in [vec![1, 2, 3, 4], (5..=10).collect::<Vec<i64>>()] {
        ensure!(counterexamples::reflection_involution_check(&c).map_err(e)?.holds, "involution on {:?}", c);
    }
    Ok(())
}

fn rodl_examples() -> Result<(), String> {
    let s = counterexamples::dyadic_ball_search(6, &frac(1, 5), Parity::Odd, 2).map_err(e)?;
    ensure!(s.found.is_none(), "homogeneous ball found at L=6");
    let h = blocks(8, 2, 2, true);
    let r = counterexamples::definable_homogeneous_search(&h, &Measure::uniform(0, 8), &frac(1, 10), 2, 1_000_000, 0)
        .map_err(e)?;
    let w = r.found.ok_or("no clique found")?;
    ensure!(w.density == rational::one() && w.mass == frac(1, 2), "clique witness");
    Ok(())
}

fn roundtrip_examples() -> Result<(), String> {
    let empty = Hypergraph::new(vec![3, 3], Vec::<Vec<u32>>::new(), false).map_err(e)?;
    let mut spec = GeneratorSpec::new(GeneratorKind::RandomVcCapped, 200, 5);
    spec.cap = Some(8);
    spec.ladder_cap = 0;
    let big = instances::generate(&spec).map_err(e)?.hypergraph;
    ensure!(big.edge_count() >= 10_000, "random instance has {} edges", big.edge_count());
    for h in [empty, half_graph(4), big] {
        let back = format::hypergraph_from_str(&format::hypergraph_to_string(&h)).map_err(e)?;
        ensure!(back == h, "roundtrip changed the relation");
    }
    Ok(())
}

fn cli_examples() -> Result<(), String> {
    let out = crate::cli::execute(["vcreg", "dyadic", "density", "--depth", "4"]);
    let report = out.report.ok_or("no report")?;
    ensure!(out.code == 0, "exit {}", out.code);
    ensure!(report.outputs["density"] == "1/3", "density {}", report.outputs["density"]);
    Ok(())
}

fn tuples_example() -> Result<(), String> {
    ensure!(Tuples::new(&[2, 3]).count() == 6, "tuple enumeration");
    Ok(())
}

pub const CASES: &[Case] = &[
    ("fiber", fiber_example),
    ("measure", measure_examples),
    ("fubini", fubini_example),
    ("vc", vc_examples),
    ("atoms", atoms_example),
    ("net", net_example),
    ("delta", delta_example),
    ("rect", rect_examples),
    ("partition", partition_examples),
    ("adversarial", adversarial_example),
    ("dense-box", dense_box_examples),
    ("goodness", goodness_examples),
    ("stable", stable_examples),
    ("ladder", ladder_examples),
    ("dyadic", dyadic_examples),
    ("convexity", convexity_examples),
    ("rodl", rodl_examples),
    ("roundtrip", roundtrip_examples),
    ("tuples", tuples_example),
    ("cli", cli_examples),
];

pub fn run_cases(filter: Option<&str>) -> Vec<Check> {
    CASES
        .par_iter()
        .filter(|(name, _)| filter.is_none_or(|f| name.contains(f)))
        .map(|(name, f)| {
            let r = f();
            Check {
                name: format!("selftest:{name}"),
                passed: r.is_ok(),
                detail: r.err(),
            }
        })
        .collect()
}

pub fn run(args: &SelftestArgs, report: &mut RunReport) {
    if let Some(f) = &args.filter {
        report.arg("filter", f);
    }
    let checks = run_cases(args.filter.as_deref());
    report.output(&serde_json::json!({
        "cases": checks.len(),
        "failed": checks.iter().filter(|c| !c.passed).count(),
    }));
    report.verification.extend(checks);
}
