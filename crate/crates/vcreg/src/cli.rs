use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vcreg_core::counterexamples::Parity;
use vcreg_core::instances::GeneratorKind;
use vcreg_core::rational::{self, Rational};
use vcreg_core::vc::NetStrategy;

use crate::commands;
use crate::error::{EXIT_INPUT, EXIT_VERIFY};
use crate::format;
use crate::report::RunReport;
use crate::threads;

fn parse_rational(s: &str) -> Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "vcreg", version, about = "Exact regularity partitions for finite relations of bounded VC dimension")]
pub struct Cli {
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// VC dimension, shatter function and epsilon-nets of a fiber family.
    #[command(subcommand)]
    Vc(VcCommand),
    /// Rectangular approximations, regular partitions and dense boxes.
    #[command(subcommand)]
    Reg(RegCommand),
    /// Ladders and Σ-free partitions for stable relations.
    #[command(subcommand)]
    Stable(StableCommand),
    /// The odd-split graph on the leaves of the binary tree.
    #[command(subcommand)]
    Dyadic(DyadicCommand),
    /// The convexity 3-hypergraph on integer sets.
    #[command(subcommand)]
    Convexity(ConvexityCommand),
    /// Search for definable homogeneous sets.
    #[command(subcommand)]
    Rodl(RodlCommand),
    /// Generate a seeded instance.
    Gen(GenArgs),
    /// Run the built-in oracle suite.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Relation JSON (bare, `gen` output, or a run report carrying one).
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// Measures JSON: a list of `{"part", "weights"}` objects. Defaults to
    /// the file's own measures, else uniform.
    #[arg(long, value_name = "FILE")]
    pub measure: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// Coordinates forming the ground set; fibers are taken over the rest.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub points: Vec<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    Greedy,
    Random,
}

impl From<StrategyArg> for NetStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Greedy => NetStrategy::Greedy,
            StrategyArg::Random => NetStrategy::Random,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum ParityArg {
    #[default]
    Odd,
    Even,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Odd => Parity::Odd,
            ParityArg::Even => Parity::Even,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum VcCommand {
    /// VC dimension of the fibers.
    Dim {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = vcreg_core::vc::DEFAULT_VC_CAP)]
        cap: usize,
    },
    /// Shatter function at `n` with the Sauer comparison.
    Shatter {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
    },
    /// Epsilon-net for the fibers.
    Net {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_parser = parse_rational)]
        epsilon: Rational,
        #[arg(long, value_enum, default_value = "greedy")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum RegCommand {
    /// Regular partition with 0–1 densities.
    Partition {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long, value_parser = parse_rational)]
        epsilon: Rational,
        /// One partition of the common vertex set (symmetric relations).
        #[arg(long)]
        uniform: bool,
        /// Recorded only; the construction is deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a stored partition against a relation.
    Verify {
        #[command(flatten)]
        io: InputArgs,
        /// Partition JSON (a `reg partition` report or a bare partition).
        #[arg(long, value_name = "FILE")]
        partition: PathBuf,
    },
    /// Rectangular approximation by definable boxes.
    Rect {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long, value_parser = parse_rational)]
        epsilon: Rational,
    },
    /// Box of density above `1 - ε` in a relation of density at least `α`.
    EhBox {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long, value_parser = parse_rational)]
        alpha: Rational,
        #[arg(long, value_parser = parse_rational)]
        epsilon: Rational,
    },
}

#[derive(Debug, Subcommand)]
pub enum StableCommand {
    /// Longest ladder, with a certificate.
    Ladder {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = vcreg_core::instances::DEFAULT_LADDER_CAP)]
        cap: usize,
    },
    /// Σ-free regular partition.
    Partition {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long, value_parser = parse_rational)]
        epsilon: Rational,
        #[arg(long, default_value_t = 8)]
        depth_cap: usize,
        /// Cross-refinement rounds (default `2k`).
        #[arg(long)]
        rounds: Option<usize>,
        /// Stability parameter; measured by ladder search when absent.
        #[arg(long)]
        d_hat: Option<usize>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct BallArgs {
    #[arg(long)]
    pub depth: usize,
    /// Ball prefix as a bit string; repeat for a union. Defaults to the root.
    #[arg(long = "prefix")]
    pub prefixes: Vec<String>,
    #[arg(long, value_enum, default_value = "odd")]
    pub parity: ParityArg,
}

#[derive(Debug, Subcommand)]
pub enum DyadicCommand {
    /// Edge density over distinct leaf pairs of a ball union.
    Density {
        #[command(flatten)]
        balls: BallArgs,
    },
    /// Density of single balls at every prefix length.
    Report {
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value = "odd")]
        parity: ParityArg,
    },
    /// Anti-homogeneity bound for a ball union and a ball inside it.
    Bound {
        #[command(flatten)]
        balls: BallArgs,
        /// The inner ball; defaults to the first union ball.
        #[arg(long)]
        ball: Option<String>,
        /// Draw a random union instead of reading prefixes.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 8)]
        max_balls: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct IntegerSetArgs {
    #[arg(long)]
    pub n: i64,
    /// Sub-interval `lo,hi` of `1..=n`; defaults to all of it.
    #[arg(long, value_delimiter = ',', value_name = "LO,HI")]
    pub interval: Option<Vec<i64>>,
}

#[derive(Debug, Subcommand)]
pub enum ConvexityCommand {
    /// Density of increasing triples with `x1 + x3 ≥ 2 x2`
    Density {
        #[command(flatten)]
        set: IntegerSetArgs,
    },
    /// Check that the reflection `x ↦ lo + hi - x` maps strict edges to non-edges
    Involution {
        #[command(flatten)]
        set: IntegerSetArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum RodlCommand {
    /// Heaviest homogeneous Boolean combination of at most `m` fibers.
    Search {
        /// Relation to search; without it the dyadic graph of `--depth` is used.
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        measure: Option<PathBuf>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value = "odd")]
        parity: ParityArg,
        #[arg(long, value_parser = parse_rational)]
        eps: Rational,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = vcreg_core::counterexamples::DEFAULT_SEARCH_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    IntervalGraph,
    HalfGraph,
    BlockUnion,
    Staircase,
    RandomVcCapped,
    DyadicExport,
}

impl From<KindArg> for GeneratorKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::IntervalGraph => GeneratorKind::IntervalGraph,
            KindArg::HalfGraph => GeneratorKind::HalfGraph,
            KindArg::BlockUnion => GeneratorKind::BlockUnion,
            KindArg::Staircase => GeneratorKind::Staircase,
            KindArg::RandomVcCapped => GeneratorKind::RandomVcCapped,
            KindArg::DyadicExport => GeneratorKind::DyadicExport,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: KindArg,
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub blocks: Option<usize>,
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long)]
    pub shuffle: bool,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, value_enum, default_value = "odd")]
    pub parity: ParityArg,
    #[arg(long, default_value_t = vcreg_core::instances::DEFAULT_LADDER_CAP)]
    pub ladder_cap: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    /// Only run cases whose name contains this string.
    #[arg(long)]
    pub filter: Option<String>,
}

/// Result of one invocation, before anything is printed.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Option<RunReport>,
    /// Help text or an error message for standard error.
    pub message: Option<String>,
}

/// Parses `argv` and runs the command without touching standard output.
pub fn execute<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            return Outcome {
                code,
                report: None,
                message: Some(e.render().to_string()),
            };
        }
    };
    threads::init();
    let start = Instant::now();
    let name = cli.command.name();
    let result = commands::dispatch(&cli.command);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let (code, mut report, message) = match result {
        Ok(report) => {
            let code = if report.passed() { 0 } else { EXIT_VERIFY };
            let message = (code != 0).then(|| {
                let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
                format!("verification failed: {}", names.join(", "))
            });
            (code, report, message)
        }
        Err(e) if e.exit_code() == EXIT_VERIFY => {
            let mut report = RunReport::new(&name);
            report.check_detail("construction", false, e.to_string());
            (EXIT_VERIFY, report, Some(e.to_string()))
        }
        Err(e) => {
            return Outcome {
                code: e.exit_code(),
                report: None,
                message: Some(format!("error: {e}")),
            }
        }
    };
    report.timing.elapsed_ms = elapsed_ms;
    if let Some(path) = &cli.out {
        if let Err(e) = format::write_atomic(path, &report.to_json()) {
            return Outcome {
                code: EXIT_INPUT,
                report: Some(report),
                message: Some(format!("error: {e}")),
            };
        }
    }
    Outcome {
        code,
        report: Some(report),
        message,
    }
}

/// Runs the command line, printing the report to standard output unless
/// `--out` was given, and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<T> = argv.into_iter().collect();
    let to_file = argv.iter().any(|a| {
        let s: OsString = a.clone().into();
        s == "--out" || s.to_string_lossy().starts_with("--out=")
    });
    let outcome = execute(argv);
    if let Some(report) = &outcome.report {
        if !to_file {
            print!("{}", report.to_json());
        }
    }
    if let Some(msg) = &outcome.message {
        if outcome.code == 0 {
            print!("{msg}");
        } else {
            eprintln!("{}", msg.trim_end());
        }
    }
    outcome.code
}

impl Command {
    pub fn name(&self) -> String {
        let (group, sub) = match self {
            Command::Vc(c) => (
                "vc",
                match c {
                    VcCommand::Dim { .. } => "dim",
                    VcCommand::Shatter { .. } => "shatter",
                    VcCommand::Net { .. } => "net",
                },
            ),
            Command::Reg(c) => (
                "reg",
                match c {
                    RegCommand::Partition { .. } => "partition",
                    RegCommand::Verify { .. } => "verify",
                    RegCommand::Rect { .. } => "rect",
                    RegCommand::EhBox { .. } => "eh-box",
                },
            ),
            Command::Stable(c) => (
                "stable",
                match c {
                    StableCommand::Ladder { .. } => "ladder",
                    StableCommand::Partition { .. } => "partition",
                },
            ),
            Command::Dyadic(c) => (
                "dyadic",
                match c {
                    DyadicCommand::Density { .. } => "density",
                    DyadicCommand::Report { .. } => "report",
                    DyadicCommand::Bound { .. } => "bound",
                },
            ),
            Command::Convexity(c) => (
                "convexity",
                match c {
                    ConvexityCommand::Density { .. } => "density",
                    ConvexityCommand::Involution { .. } => "involution",
                },
            ),
            Command::Rodl(RodlCommand::Search { .. }) => ("rodl", "search"),
            Command::Gen(_) => ("gen", ""),
            Command::Selftest(_) => ("selftest", ""),
        };
        if sub.is_empty() {
            group.to_string()
        } else {
            format!("{group} {sub}")
        }
    }
}
