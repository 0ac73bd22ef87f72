mod bench;
mod config;
mod instance;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use menuprobe::io::{read_game, transcript_to_json, write_game};
use menuprobe::learners::{
    check_assumption_breakpoints, check_assumption_no_dominant, check_assumption_nonparallel, AssumptionReport,
};
use menuprobe::TypeId;

use crate::config::{pick, ClassArg, ExperimentConfig, LearnerArg};
use crate::instance::{default_report, exit_code_for, generate, run_learner, RunResult, Sizes};

const AFTER_HELP: &str = "\
Exit codes:
  0  success (run: identified type equals --true-type; check: all requested assumptions hold)
  1  wrong answer (run: other type, no match, ambiguous match; check: an assumption fails)
  2  precondition gate (dimension or assumption gate, invalid parameters, IO)

Bench CSV columns (header row always present; rows sorted by class in the order
listed under --class, then m, n, K, learner):
  class        game class
  m            leader/strategy dimension parameter
  n            number of agent actions
  K            number of types in the generated game
  learner      single-round | menu | single-strategy | infinite
  trials       trials that passed the learner's gates
  mean_rounds  mean interaction rounds over every (trial, ground-truth type)
  max_rounds   maximum interaction rounds
  accuracy     fraction identified correctly (infinite: behaviorally equivalent)
  wall_ms      total wall time in ms with --timing, 0 otherwise

The seed comes from --seed, then the config file, then MENUPROBE_SEED, then 0.
A --config JSON file may set any
flag (keys: class, m, n, K, r, nw, no, learner, trials, seed, precision_bits,
true_type, out, timing); flags given on the command line win.";

#[derive(Parser)]
#[command(name = "menuprobe", version, about = "Identify agent types from menu choices", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a game and write it as JSON.
    Gen(GenArgs),
    /// Run one learner against a simulated agent.
    Run(RunArgs),
    /// Sweep a grid of classes, sizes and learners; write a CSV summary.
    #[command(after_help = AFTER_HELP)]
    Bench(BenchArgs),
    /// Check structural assumptions of a game file.
    Check(CheckArgs),
}

#[derive(Args, Clone)]
struct Shared {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed; falls back to the config file, then MENUPROBE_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct Sizing {
    /// Leader actions / outcomes / strategy dimension.
    #[arg(long)]
    m: Option<usize>,
    /// Agent actions (targets for security).
    #[arg(long)]
    n: Option<usize>,
    /// Number of types.
    #[arg(long = "K")]
    k: Option<usize>,
    /// Defender resources.
    #[arg(long)]
    r: Option<usize>,
    /// States (info-acq).
    #[arg(long)]
    nw: Option<usize>,
    /// Observations (info-acq).
    #[arg(long)]
    no: Option<usize>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    shared: Shared,
    #[arg(long, value_enum)]
    class: Option<ClassArg>,
    #[command(flatten)]
    sizing: Sizing,
    /// Output game file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    shared: Shared,
    /// Game JSON file.
    #[arg(long)]
    game: PathBuf,
    #[arg(long, value_enum)]
    learner: Option<LearnerArg>,
    /// Ground-truth type id (default: the first type).
    #[arg(long)]
    true_type: Option<String>,
    /// Bits of precision for the infinite-type learner.
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Transcript JSON file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Learner report JSON file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    shared: Shared,
    #[arg(long, value_enum, value_delimiter = ',')]
    class: Vec<ClassArg>,
    #[arg(long, value_delimiter = ',')]
    m: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long = "K", value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    nw: Option<usize>,
    #[arg(long)]
    no: Option<usize>,
    #[arg(long, value_enum, value_delimiter = ',')]
    learner: Vec<LearnerArg>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Record wall time; off by default so output is reproducible.
    #[arg(long)]
    timing: bool,
    /// CSV output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Nonparallel,
    NoDominant,
    Breakpoints,
}

#[derive(Args)]
struct CheckArgs {
    /// Game JSON file.
    game: PathBuf,
    /// Assumptions to check (default: nonparallel for d >= 2, the other two for d = 1).
    #[arg(long, value_enum, value_delimiter = ',')]
    assumptions: Vec<Which>,
    /// Write the JSON report here as well.
    #[arg(long)]
    out: Option<PathBuf>,
}

const DEFAULT_M: usize = 3;
const DEFAULT_N: usize = 3;
const DEFAULT_K: usize = 4;
const DEFAULT_R: usize = 1;
const DEFAULT_SIGNALS: usize = 2;
const DEFAULT_TRIALS: usize = 10;
const DEFAULT_BITS: u32 = 40;
const MAX_LISTED: usize = 8;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn gate(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<menuprobe::Error> for Failure {
    fn from(e: menuprobe::Error) -> Self {
        Failure {
            code: exit_code_for(&e),
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn load_config(shared: &Shared) -> Result<ExperimentConfig, Failure> {
    match &shared.config {
        Some(p) => ExperimentConfig::load(p).map_err(Failure::gate),
        None => Ok(ExperimentConfig::default()),
    }
}

fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag.or(file) {
        return Ok(s);
    }
    match std::env::var("MENUPROBE_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::gate(format!("MENUPROBE_SEED is not an unsigned integer: {v:?}"))),
        Err(_) => Ok(0),
    }
}

fn first<T: Copy>(v: Vec<T>) -> T {
    v[0]
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::gate(format!("writing {}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn print_report(report: &AssumptionReport) {
    let flags = [
        ("nonparallel", report.nonparallel_ok),
        ("no-dominant", report.no_dominant_ok),
        ("breakpoints", report.breakpoints_ok),
    ];
    for (name, flag) in flags {
        if let Some(ok) = flag {
            eprintln!("{name}: {}", if ok { "ok" } else { "VIOLATED" });
        }
    }
    for v in report.violations.iter().take(MAX_LISTED) {
        let types: Vec<&str> = v.types.iter().map(|t| t.0.as_str()).collect();
        eprintln!("  {} [{}]: {}", v.assumption, types.join(", "), v.detail);
    }
    if report.violations.len() > MAX_LISTED {
        eprintln!(
            "  ... and {} more (see the JSON report)",
            report.violations.len() - MAX_LISTED
        );
    }
}

fn cmd_gen(args: GenArgs) -> CmdResult {
    let cfg = load_config(&args.shared)?;
    let class = first(pick(args.class.into_iter().collect(), cfg.class, ClassArg::Stackelberg));
    let s = &args.sizing;
    let sizes = Sizes {
        m: first(pick(s.m.into_iter().collect(), cfg.m, DEFAULT_M)),
        n: first(pick(s.n.into_iter().collect(), cfg.n, DEFAULT_N)),
        k: first(pick(s.k.into_iter().collect(), cfg.k, DEFAULT_K)),
        r: s.r.or(cfg.r).unwrap_or(DEFAULT_R),
        nw: s.nw.or(cfg.nw).unwrap_or(DEFAULT_SIGNALS),
        no: s.no.or(cfg.no).unwrap_or(DEFAULT_SIGNALS),
    };
    let seed = resolve_seed(args.shared.seed, cfg.seed)?;
    let out = args.out.or(cfg.out);

    let game = generate(class, sizes, seed)?;
    let d = game.space.effective_dim();
    if d == 1 && game.n_types() > 2 {
        eprintln!(
            "warning: effective dimension 1 with K={} types; no single finite menu separates them, single-round identification is impossible",
            game.n_types()
        );
    }
    if class == ClassArg::Security {
        let slice = instance::one_dimensional(&game)?;
        eprintln!("full coverage space:");
        print_report(&default_report(&game)?);
        eprintln!("uniform-coverage slice:");
        print_report(&default_report(&slice)?);
    } else {
        print_report(&default_report(&game)?);
    }
    match &out {
        Some(p) => {
            write_game(p, &game)?;
            eprintln!("wrote {} ({} types, d={d})", p.display(), game.n_types());
        }
        None => println!("{}", menuprobe::io::game_to_json(&game)),
    }
    Ok(0)
}

fn cmd_run(args: RunArgs) -> CmdResult {
    let cfg = load_config(&args.shared)?;
    let learner = first(pick(
        args.learner.into_iter().collect(),
        cfg.learner,
        LearnerArg::SingleRound,
    ));
    let seed = resolve_seed(args.shared.seed, cfg.seed)?;
    let bits = args.precision_bits.or(cfg.precision_bits).unwrap_or(DEFAULT_BITS);
    let out = args.out.or(cfg.out);
    let game = read_game(&args.game)?;
    let truth = match args.true_type.or(cfg.true_type) {
        Some(id) => {
            let id = TypeId(id);
            game.types
                .iter()
                .position(|t| t.id() == &id)
                .ok_or_else(|| Failure::gate(format!("no type {id} in {}", args.game.display())))?
        }
        None => 0,
    };
    let truth_id = game.types[truth].id().clone();

    let result = run_learner(&game, learner, truth, seed, bits)?;
    let transcript = match &result {
        RunResult::Identified(id) => &id.transcript,
        RunResult::Reconstructed { outcome, .. } => &outcome.transcript,
    };
    write_or_print(out.as_deref(), &transcript_to_json(transcript))?;
    if let Some(p) = &args.report {
        let report = result.report(learner, default_report(&game)?);
        write_or_print(Some(p), &report.to_json()?)?;
    }

    let correct = result.correct(&truth_id);
    match &result {
        RunResult::Identified(id) => {
            eprintln!(
                "identified {} (truth {truth_id}) in {} rounds",
                id.type_id,
                result.rounds()
            );
        }
        RunResult::Reconstructed { outcome, equivalent } => {
            eprintln!(
                "{}",
                serde_json::to_string(&outcome.reconstruction).map_err(menuprobe::Error::from)?
            );
            eprintln!(
                "queries {} (rounds/(n^2 L) = {:.3}); behaviorally equivalent: {equivalent}",
                result.rounds(),
                outcome.round_constant()
            );
        }
    }
    Ok(if correct { 0 } else { 1 })
}

fn cmd_check(args: CheckArgs) -> CmdResult {
    let game = read_game(&args.game)?;
    let report = if args.assumptions.is_empty() {
        default_report(&game)?
    } else {
        let mut report = AssumptionReport::default();
        for w in &args.assumptions {
            let part = match w {
                Which::Nonparallel => check_assumption_nonparallel(&game),
                Which::NoDominant => check_assumption_no_dominant(&game)?,
                Which::Breakpoints => check_assumption_breakpoints(&game)?,
            };
            report = report.merge(part);
        }
        report
    };
    print_report(&report);
    let json = serde_json::to_string_pretty(&report).map_err(menuprobe::Error::from)?;
    println!("{json}");
    if let Some(p) = &args.out {
        write_or_print(Some(p), &json)?;
    }
    Ok(if report.all_ok() { 0 } else { 1 })
}

fn cmd_bench(args: BenchArgs) -> CmdResult {
    let cfg = load_config(&args.shared)?;
    let plan = bench::Plan {
        classes: pick(args.class, cfg.class, ClassArg::Stackelberg),
        ms: pick(args.m, cfg.m, DEFAULT_M),
        ns: pick(args.n, cfg.n, DEFAULT_N),
        ks: pick(args.k, cfg.k, DEFAULT_K),
        r: args.r.or(cfg.r).unwrap_or(DEFAULT_R),
        nw: args.nw.or(cfg.nw).unwrap_or(DEFAULT_SIGNALS),
        no: args.no.or(cfg.no).unwrap_or(DEFAULT_SIGNALS),
        learners: pick(args.learner, cfg.learner, LearnerArg::SingleRound),
        trials: args.trials.or(cfg.trials).unwrap_or(DEFAULT_TRIALS),
        seed: resolve_seed(args.shared.seed, cfg.seed)?,
        precision_bits: args.precision_bits.or(cfg.precision_bits).unwrap_or(DEFAULT_BITS),
        timing: args.timing || cfg.timing.unwrap_or(false),
    };
    if plan.trials == 0 {
        return Err(Failure::gate("trials must be at least 1"));
    }
    let rows = bench::run(&plan);
    write_or_print(args.out.or(cfg.out).as_deref(), bench::to_csv(&rows).trim_end())?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Run(a) => cmd_run(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Check(a) => cmd_check(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
