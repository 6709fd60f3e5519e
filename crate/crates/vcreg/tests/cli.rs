use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use vcreg::format::hypergraph_to_string;
use vcreg::{execute, Outcome, RunReport};
use vcreg_core::rational::{self, frac};
use vcreg_core::Hypergraph;

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_relation(name: &str, h: &Hypergraph) -> PathBuf {
    let path = scratch(name);
    std::fs::write(&path, hypergraph_to_string(h)).unwrap();
    path
}

fn half_graph(n: usize) -> Hypergraph {
    Hypergraph::from_predicate(vec![n, n], false, |t| t[0] <= t[1]).unwrap()
}

fn run(args: &[&str]) -> Outcome {
    execute(std::iter::once("vcreg").chain(args.iter().copied()))
}

fn passing(args: &[&str]) -> RunReport {
    let out = run(args);
    assert_eq!(out.code, 0, "{:?}: {:?}", args, out.message);
    let report = out.report.unwrap();
    assert!(report.passed());
    report
}

#[test]
fn half_graph_partition() {
    let path = write_relation("half16.json", &half_graph(16));
    let report = passing(&["reg", "partition", "--in", path.to_str().unwrap(), "--epsilon", "1/4"]);
    let sigma = report.outputs["report"]["sigma_mass"].as_str().unwrap();
    assert!(rational::parse(sigma).unwrap() <= frac(1, 4));
    assert_eq!(report.inputs.files.len(), 1);
    assert_eq!(report.inputs.files[0].sha256.len(), 64);
}

#[test]
fn dyadic_root_density() {
    let report = passing(&["dyadic", "density", "--depth", "4"]);
    assert_eq!(report.outputs["density"], "1/3");
}

#[test]
fn empty_relation_has_vc_zero() {
    let h = Hypergraph::new(vec![3, 3], Vec::<Vec<u32>>::new(), false).unwrap();
    let path = write_relation("empty.json", &h);
    let report = passing(&["vc", "dim", "--in", path.to_str().unwrap()]);
    assert_eq!(report.outputs["vc"]["value"], 0);
}

#[test]
fn usage_errors_exit_two() {
    let path = write_relation("half4.json", &half_graph(4));
    let p = path.to_str().unwrap();
    for args in [
        vec!["reg", "partition", "--in", p, "--epsilon", "1/4", "--bogus"],
        vec!["reg", "partition", "--in", p, "--epsilon", "0.25"],
        vec!["reg", "partition", "--in", "/nonexistent/file.json", "--epsilon", "1/4"],
        vec!["vc", "net", "--in", p, "--epsilon", "-1/4"],
        vec!["frobnicate"],
        vec!["convexity", "density", "--n", "10", "--interval", "3"],
    ] {
        let out = run(&args);
        assert_eq!(out.code, 2, "{:?}", args);
        assert!(out.report.is_none());
    }
}

#[test]
fn malformed_json_reports_position() {
    let path = scratch("broken.json");
    std::fs::write(&path, "{\n  \"k\": 2,\n  \"part_sizes\": [2, 2],\n  \"edges\": [[0, 1],\n").unwrap();
    let out = run(&["vc", "dim", "--in", path.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.message.unwrap().contains("line"));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.message.unwrap().contains("reg"));
}

#[test]
fn reports_roundtrip_through_json() {
    let rel = write_relation("half6.json", &half_graph(6));
    let blocks = Hypergraph::from_predicate(vec![8, 8], false, |t| t[0] / 4 == t[1] / 4).unwrap();
    let blk = write_relation("blocks8.json", &blocks);
    let sym = Hypergraph::from_predicate(vec![6, 6], true, |t| t[0] != t[1] && t[0] % 2 == t[1] % 2)
        .unwrap();
    let symp = write_relation("sym6.json", &sym);
    let (r, b, s) = (rel.to_str().unwrap(), blk.to_str().unwrap(), symp.to_str().unwrap());
    let cases: Vec<Vec<&str>> = vec![
        vec!["vc", "dim", "--in", r],
        vec!["vc", "shatter", "--in", r, "--n", "3"],
        vec!["vc", "net", "--in", r, "--epsilon", "1/3", "--strategy", "random", "--seed", "7"],
        vec!["reg", "partition", "--in", r, "--epsilon", "1/2"],
        vec!["reg", "partition", "--in", s, "--epsilon", "1/2", "--uniform"],
        vec!["reg", "rect", "--in", r, "--epsilon", "1/4"],
        vec!["reg", "eh-box", "--in", b, "--alpha", "2/5", "--epsilon", "1/10"],
        vec!["stable", "ladder", "--in", r],
        vec!["stable", "partition", "--in", b, "--epsilon", "1/8"],
        vec!["dyadic", "density", "--depth", "6", "--prefix", "01", "--prefix", "1"],
        vec!["dyadic", "report", "--depth", "6"],
        vec!["dyadic", "bound", "--depth", "8", "--seed", "3"],
        vec!["convexity", "density", "--n", "30"],
        vec!["convexity", "involution", "--n", "30", "--interval", "4,17"],
        vec!["rodl", "search", "--depth", "4", "--eps", "1/10", "--m", "1"],
        vec!["rodl", "search", "--in", s, "--eps", "1/10"],
        vec!["gen", "staircase", "--n", "4", "--k", "3"],
        vec!["gen", "random-vc-capped", "--n", "12", "--cap", "4", "--seed", "5"],
    ];
    for args in cases {
        let report = passing(&args);
        let text = report.to_json();
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.without_timing(), report.without_timing(), "{:?}", args);
        assert_eq!(report.subcommand, format!("{} {}", args[0], args[1]).replace(" staircase", "").replace(" random-vc-capped", ""));
    }
}

#[test]
fn gen_output_feeds_other_commands() {
    let out = scratch("gen-half.json");
    let _ = std::fs::remove_file(&out);
    let report = run(&["--out", out.to_str().unwrap(), "gen", "half-graph", "--n", "8", "--shuffle", "--seed", "2"]);
    assert_eq!(report.code, 0);
    let ladder = passing(&["stable", "ladder", "--in", out.to_str().unwrap()]);
    assert_eq!(ladder.outputs["length"], 8);
}

#[test]
fn out_file_is_written_whole() {
    let out = scratch("density-report.json");
    let _ = std::fs::remove_file(&out);
    let o = run(&["--out", out.to_str().unwrap(), "dyadic", "density", "--depth", "6"]);
    assert_eq!(o.code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let back: RunReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back.without_timing(), o.report.unwrap().without_timing());
    let leftovers: Vec<_> = std::fs::read_dir(out.parent().unwrap())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with(".density-report"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn same_seed_same_report() {
    let rel = write_relation("half10.json", &half_graph(10));
    let r = rel.to_str().unwrap();
    for args in [
        vec!["vc", "net", "--in", r, "--epsilon", "1/5", "--strategy", "random", "--seed", "11"],
        vec!["dyadic", "bound", "--depth", "9", "--seed", "42"],
        vec!["gen", "interval-graph", "--n", "16", "--seed", "9"],
        vec!["reg", "partition", "--in", r, "--epsilon", "1/8"],
    ] {
        let a = passing(&args).without_timing();
        let b = passing(&args).without_timing();
        assert_eq!(a, b);
    }
}

#[test]
fn binary_prints_report_and_exit_status() {
    let exe = env!("CARGO_BIN_EXE_vcreg");
    let out = Command::new(exe)
        .args(["convexity", "density", "--n", "12"])
        .env("VCREG_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["subcommand"], "convexity density");
    let out = Command::new(exe).args(["vc", "dim", "--cap"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}
