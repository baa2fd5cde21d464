use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mtlab::domains::positions::{append_position, load_position_set, parse_record, PositionSource};
use mtlab::domains::{OthelloAdapter, SyntheticTree, TreeConfig, ValueModel};
use mtlab::drivers::{run_algorithm, Algorithm, DriverParams};
use mtlab::harness::bench::{emit_csv, run_bench, write_csv, BenchError, Metric, RunConfig};
use mtlab::harness::verify::{run_verify, Suite, VerifyOptions};
use mtlab::model::{fmt_value, GameAdapter, SearchSpec, Value};
use mtlab::oracles::brute_minimax;
use mtlab::search::{SearchConfig, Searcher};
use mtlab::ttable::TtFault;
use mtlab::SearchError;

const USAGE: u8 = 2;
const VERIFY_FAILED: u8 = 1;
const UNSOUND: u8 = 3;

#[derive(Parser)]
#[command(
    name = "mtlab",
    version,
    about = "Benchmark and verify MT-based minimax search drivers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterative-deepening benchmark over a position set, written as CSV.
    Bench(BenchArgs),
    /// Run a property suite over seeded synthetic trees.
    Verify(VerifyArgs),
    /// Append a synthetic tree record to a position set.
    Gen(GenArgs),
    /// Search one position with one algorithm and print the bound history.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    positions: PathBuf,
    /// Comma-separated algorithm ids, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    algos: Vec<String>,
    #[arg(long, default_value_t = 8)]
    depth: u32,
    #[arg(long, default_value_t = SearchSpec::DEFAULT_TT_BITS)]
    tt_bits: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "nbp")]
    metric: Metric,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Benchmark positions one at a time.
    #[arg(long)]
    serial: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite id, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    seed: u64,
    #[arg(long)]
    count: Option<usize>,
    /// Inject a broken bound merge into the table; the suites should fail.
    #[arg(long)]
    mutate: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    width: u32,
    #[arg(long)]
    depth: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.9)]
    p: f64,
    #[arg(long, default_value = "edge")]
    model: ValueModel,
    #[arg(long, default_value_t = 100)]
    range: Value,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// A position-set record, e.g. `othello standard`.
    #[arg(long)]
    position: String,
    #[arg(long)]
    algo: Algorithm,
    #[arg(long)]
    depth: u32,
    #[arg(long, default_value_t = SearchSpec::DEFAULT_TT_BITS)]
    tt_bits: u32,
    /// First guess for mtd-f, centre for asp-negascout.
    #[arg(long, default_value_t = 0)]
    guess: Value,
}

enum Failure {
    Usage(String),
    Unsound(String),
    Verify,
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Unsound { .. }
            | SearchError::NonConvergence { .. }
            | SearchError::EvalOutOfRange { .. } => Failure::Unsound(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Bench(a) => bench(a),
        Command::Verify(a) => verify(a),
        Command::Gen(a) => gen(a),
        Command::Analyze(a) => analyze(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(VERIFY_FAILED),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
        Err(Failure::Unsound(msg)) => {
            eprintln!("internal failure: {msg}");
            ExitCode::from(UNSOUND)
        }
    }
}

fn parse_algorithms(ids: &[String]) -> Result<Vec<Algorithm>, Failure> {
    if ids.iter().any(|s| s == "all") {
        return Ok(Algorithm::ALL.to_vec());
    }
    ids.iter()
        .map(|s| s.trim().parse::<Algorithm>().map_err(Failure::from))
        .collect()
}

fn bench(a: BenchArgs) -> Result<(), Failure> {
    let positions = load_position_set(&a.positions).map_err(|e| Failure::Usage(e.to_string()))?;
    let cfg = RunConfig {
        algorithms: parse_algorithms(&a.algos)?,
        max_depth: a.depth,
        tt_bits: a.tt_bits,
        seed: a.seed,
        positions,
        metric: a.metric,
        out: a.out,
        parallel: !a.serial,
    };
    let report = run_bench(&cfg).map_err(|e| match e {
        BenchError::Config(e) => Failure::Usage(e.to_string()),
        other => Failure::Unsound(other.to_string()),
    })?;
    match &cfg.out {
        Some(path) => emit_csv(&report.records, path).map_err(|e| Failure::Usage(e.to_string()))?,
        None => write_csv(&report.records, std::io::stdout().lock())
            .map_err(|e| Failure::Usage(e.to_string()))?,
    }

    for alg in cfg.effective_algorithms() {
        let last: Vec<f64> = report
            .records
            .iter()
            .filter(|r| r.algorithm == alg && r.depth == cfg.max_depth)
            .map(|r| r.ratio_vs_baseline)
            .collect();
        if last.is_empty() {
            continue;
        }
        let mut calls: Vec<u64> = report
            .records
            .iter()
            .filter(|r| r.algorithm == alg)
            .map(|r| r.ab_calls)
            .collect();
        calls.sort_unstable();
        eprintln!(
            "{:<14} mean {} ratio at depth {}: {:.4}  median calls per iteration: {}",
            alg.id(),
            cfg.metric,
            cfg.max_depth,
            last.iter().sum::<f64>() / last.len() as f64,
            calls[calls.len() / 2]
        );
    }
    if report.diagnostics.is_empty() {
        return Ok(());
    }
    for d in &report.diagnostics {
        eprintln!("{d}");
    }
    Err(Failure::Unsound(format!(
        "{} position(s) failed",
        report.diagnostics.len()
    )))
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let suites = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![a.suite.parse::<Suite>()?]
    };
    let opts = VerifyOptions {
        seed: a.seed,
        count: a.count,
        fault: a.mutate.then_some(TtFault::ExactOnMerge),
    };
    let mut passed = true;
    for suite in suites {
        let report = run_verify(suite, &opts);
        print!("{report}");
        passed &= report.passed();
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn gen(a: GenArgs) -> Result<(), Failure> {
    let cfg = TreeConfig::new(a.width, a.depth, a.seed, a.model, a.p, a.range);
    cfg.validate()?;
    let record = PositionSource::Synthetic(cfg);
    append_position(&a.out, &record).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{record}");
    Ok(())
}

fn analyze(a: AnalyzeArgs) -> Result<(), Failure> {
    let record = parse_record(&a.position).map_err(Failure::Usage)?;
    let config = SearchConfig::with_tt_bits(a.tt_bits);
    match record {
        PositionSource::Synthetic(cfg) => {
            let tree = SyntheticTree::generate(&cfg)?;
            let value = analyze_with(&tree, config, &a)?;
            match brute_minimax(&tree, &tree.root(), a.depth) {
                Ok(v) if v == value => println!("minimax check: ok"),
                Ok(v) => {
                    return Err(Failure::Unsound(format!(
                        "{} returned {value}, minimax is {v}",
                        a.algo
                    )))
                }
                Err(e) => println!("minimax check skipped: {e}"),
            }
            Ok(())
        }
        PositionSource::Othello(board) => {
            println!("{board}");
            analyze_with(OthelloAdapter::new(board), config, &a).map(|_| ())
        }
    }
}

fn analyze_with<G: GameAdapter>(
    adapter: G,
    config: SearchConfig,
    a: &AnalyzeArgs,
) -> Result<Value, Failure> {
    let mut s = Searcher::new(adapter, config)?;
    let params = DriverParams {
        guess: a.guess,
        ..Default::default()
    };
    let r = run_algorithm(a.algo, &mut s, a.depth, &params)?;
    println!("algorithm: {}", a.algo);
    println!("depth: {}", a.depth);
    println!("value: {}", fmt_value(r.value));
    println!("alpha-beta calls: {}", r.ab_calls);
    for (i, step) in r.bound_history.iter().enumerate() {
        println!(
            "  {:>3}  gamma {:>8}  window {:<24} g {:>8}  {}",
            i + 1,
            fmt_value(step.gamma),
            step.window.to_string(),
            fmt_value(step.g),
            step.class
        );
    }
    let t = s.table_stats();
    println!(
        "nbp {}  total nodes {}  tt cutoffs {}  elapsed {:?}",
        r.stats.nbp, r.stats.total_nodes, r.stats.tt_cutoffs, r.stats.elapsed
    );
    println!(
        "table: {} stores, {} hits, {} misses, {} occupied, {} evictions",
        t.stores,
        t.hits,
        t.misses,
        t.occupancy,
        t.evictions()
    );
    Ok(r.value)
}
