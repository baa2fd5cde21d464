//! Iterative-deepening benchmark over a position set, with per-depth
//! cumulative counters and ratios against the Aspiration NegaScout baseline.

use std::fmt;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::domains::othello::OthelloAdapter;
use crate::domains::positions::PositionSource;
use crate::domains::synthetic::SyntheticTree;
use crate::drivers::{run_algorithm, Algorithm, DriverParams, DriverResult};
use crate::error::SearchError;
use crate::model::{GameAdapter, SearchSpec, Value};
use crate::search::{SearchConfig, Searcher};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Metric {
    #[default]
    Nbp,
    Total,
}

impl FromStr for Metric {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nbp" => Ok(Metric::Nbp),
            "total" => Ok(Metric::Total),
            _ => Err(SearchError::InvalidArgument(format!(
                "unknown metric `{s}`"
            ))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Nbp => "nbp",
            Metric::Total => "total",
        })
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub algorithms: Vec<Algorithm>,
    pub max_depth: u32,
    pub tt_bits: u32,
    /// Mixed into every synthetic record's seed; zero leaves them as written.
    pub seed: u64,
    pub positions: Vec<PositionSource>,
    pub metric: Metric,
    pub out: Option<PathBuf>,
    /// Benchmark positions on the rayon pool.
    pub parallel: bool,
}

impl RunConfig {
    pub fn new(algorithms: Vec<Algorithm>, positions: Vec<PositionSource>, max_depth: u32) -> Self {
        RunConfig {
            algorithms,
            max_depth,
            tt_bits: SearchSpec::DEFAULT_TT_BITS,
            seed: 0,
            positions,
            metric: Metric::Nbp,
            out: None,
            parallel: true,
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.algorithms.is_empty() {
            return Err(SearchError::InvalidArgument(
                "no algorithms selected".into(),
            ));
        }
        if self.max_depth == 0 {
            return Err(SearchError::InvalidArgument(
                "depth must be at least 1".into(),
            ));
        }
        if !(SearchSpec::MIN_TT_BITS..=SearchSpec::MAX_TT_BITS).contains(&self.tt_bits) {
            return Err(SearchError::InvalidTtBits(self.tt_bits));
        }
        Ok(())
    }

    /// Requested algorithms without duplicates, baseline last unless listed.
    pub fn effective_algorithms(&self) -> Vec<Algorithm> {
        let mut out: Vec<Algorithm> = Vec::new();
        for &a in self
            .algorithms
            .iter()
            .chain(std::iter::once(&Algorithm::BASELINE))
        {
            if !out.contains(&a) {
                out.push(a);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub domain_id: &'static str,
    pub position_id: usize,
    pub depth: u32,
    pub algorithm: Algorithm,
    pub nbp_cumulative: u64,
    pub total_nodes_cumulative: u64,
    /// Root Alpha-Beta calls at this depth alone.
    pub ab_calls: u64,
    pub tt_hits: u64,
    pub tt_stores: u64,
    pub tt_occupancy: u64,
    pub elapsed_ns: u64,
    pub ratio_vs_baseline: f64,
    /// Not part of the CSV.
    pub value: Value,
    pub tt_evictions: u64,
}

pub const CSV_HEADER: [&str; 12] = [
    "domain_id",
    "position_id",
    "depth",
    "algorithm",
    "nbp_cumulative",
    "total_nodes_cumulative",
    "ab_calls",
    "tt_hits",
    "tt_stores",
    "tt_occupancy",
    "elapsed_ns",
    "ratio_vs_baseline",
];

impl BenchRecord {
    pub fn metric(&self, m: Metric) -> u64 {
        match m {
            Metric::Nbp => self.nbp_cumulative,
            Metric::Total => self.total_nodes_cumulative,
        }
    }

    fn csv_fields(&self) -> [String; 12] {
        [
            self.domain_id.to_string(),
            self.position_id.to_string(),
            self.depth.to_string(),
            self.algorithm.id().to_string(),
            self.nbp_cumulative.to_string(),
            self.total_nodes_cumulative.to_string(),
            self.ab_calls.to_string(),
            self.tt_hits.to_string(),
            self.tt_stores.to_string(),
            self.tt_occupancy.to_string(),
            self.elapsed_ns.to_string(),
            format!("{:.4}", self.ratio_vs_baseline),
        ]
    }
}

/// A position abandoned because one of its searches failed.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub position_id: usize,
    pub position: String,
    pub algorithm: Option<Algorithm>,
    pub error: SearchError,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.algorithm {
            Some(a) => write!(
                f,
                "position {} [{}] {a}: {}",
                self.position_id, self.position, self.error
            ),
            None => write!(
                f,
                "position {} [{}]: {}",
                self.position_id, self.position, self.error
            ),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid run configuration: {0}")]
    Config(#[from] SearchError),
    #[error(
        "position {position_id} depth {depth}: {algorithm} returned {value} but {reference} returned {expected}"
    )]
    Disagreement {
        position_id: usize,
        depth: u32,
        algorithm: Algorithm,
        value: Value,
        reference: Algorithm,
        expected: Value,
    },
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
}

/// Runs every algorithm on every position with a fresh table each time.
/// All algorithms must agree on the value at every depth; a disagreement
/// aborts the whole run. Other search failures drop just that position and
/// are reported as diagnostics.
pub fn run_bench(cfg: &RunConfig) -> Result<BenchReport, BenchError> {
    cfg.validate()?;
    let algorithms = cfg.effective_algorithms();
    let job = |(id, pos): (usize, &PositionSource)| bench_position(cfg, &algorithms, id, pos);
    let outcomes: Vec<Result<Result<Vec<BenchRecord>, Diagnostic>, BenchError>> = if cfg.parallel {
        cfg.positions.par_iter().enumerate().map(job).collect()
    } else {
        cfg.positions.iter().enumerate().map(job).collect()
    };

    let mut report = BenchReport::default();
    for outcome in outcomes {
        match outcome? {
            Ok(records) => report.records.extend(records),
            Err(d) => report.diagnostics.push(d),
        }
    }
    let rank = |a: Algorithm| {
        algorithms
            .iter()
            .position(|&x| x == a)
            .unwrap_or(usize::MAX)
    };
    report
        .records
        .sort_by_key(|r| (r.position_id, rank(r.algorithm), r.depth));
    Ok(report)
}

fn bench_position(
    cfg: &RunConfig,
    algorithms: &[Algorithm],
    id: usize,
    pos: &PositionSource,
) -> Result<Result<Vec<BenchRecord>, Diagnostic>, BenchError> {
    let diagnostic = |algorithm, error| Diagnostic {
        position_id: id,
        position: pos.to_string(),
        algorithm,
        error,
    };
    let runs = match pos {
        PositionSource::Synthetic(tree_cfg) => {
            let mut tree_cfg = *tree_cfg;
            tree_cfg.seed ^= cfg.seed;
            match SyntheticTree::generate(&tree_cfg) {
                Ok(tree) => run_all(&tree, cfg, algorithms),
                Err(e) => return Ok(Err(diagnostic(None, e))),
            }
        }
        PositionSource::Othello(board) => run_all(&OthelloAdapter::new(*board), cfg, algorithms),
    };
    let runs = match runs {
        Ok(r) => r,
        Err((alg, e)) => return Ok(Err(diagnostic(Some(alg), e))),
    };

    let (reference, ref_results) = &runs[0];
    for (alg, results) in &runs[1..] {
        for (r, expected) in results.iter().zip(ref_results) {
            if r.value != expected.value {
                return Err(BenchError::Disagreement {
                    position_id: id,
                    depth: r.depth,
                    algorithm: *alg,
                    value: r.value,
                    reference: *reference,
                    expected: expected.value,
                });
            }
        }
    }

    let baseline = &runs
        .iter()
        .find(|(a, _)| *a == Algorithm::BASELINE)
        .expect("baseline is always run")
        .1;
    let mut records = Vec::new();
    for (alg, results) in &runs {
        for (r, base) in results.iter().zip(baseline) {
            let mut rec = r.record.clone();
            rec.domain_id = pos.domain_id();
            rec.position_id = id;
            rec.algorithm = *alg;
            rec.ratio_vs_baseline = ratio(rec.metric(cfg.metric), base.record.metric(cfg.metric));
            records.push(rec);
        }
    }
    Ok(Ok(records))
}

struct DepthResult {
    depth: u32,
    value: Value,
    record: BenchRecord,
}

type Runs = Vec<(Algorithm, Vec<DepthResult>)>;

fn run_all<G: GameAdapter>(
    adapter: &G,
    cfg: &RunConfig,
    algorithms: &[Algorithm],
) -> Result<Runs, (Algorithm, SearchError)> {
    algorithms
        .iter()
        .map(|&alg| {
            run_one(adapter, cfg, alg)
                .map(|r| (alg, r))
                .map_err(|e| (alg, e))
        })
        .collect()
}

fn run_one<G: GameAdapter>(
    adapter: &G,
    cfg: &RunConfig,
    alg: Algorithm,
) -> Result<Vec<DepthResult>, SearchError> {
    let mut s = Searcher::new(adapter, SearchConfig::with_tt_bits(cfg.tt_bits))?;
    let mut out = Vec::with_capacity(cfg.max_depth as usize);
    // Drive the deepening loop one depth at a time to snapshot table counters.
    let mut params = DriverParams::default();
    for depth in 1..=cfg.max_depth {
        let r: DriverResult = iterative_step(alg, &mut s, depth, &params)?;
        params.guess = r.value;
        let t = s.table_stats();
        out.push(DepthResult {
            depth,
            value: r.value,
            record: BenchRecord {
                domain_id: "",
                position_id: 0,
                depth,
                algorithm: alg,
                nbp_cumulative: r.stats.nbp,
                total_nodes_cumulative: r.stats.total_nodes,
                ab_calls: r.ab_calls,
                tt_hits: t.hits,
                tt_stores: t.stores,
                tt_occupancy: t.occupancy,
                elapsed_ns: u64::try_from(r.stats.elapsed.as_nanos()).unwrap_or(u64::MAX),
                ratio_vs_baseline: 1.0,
                value: r.value,
                tt_evictions: t.evictions(),
            },
        });
    }
    Ok(out)
}

/// One iteration of [`crate::drivers::iterative_deepening`]: a new table
/// generation, then the driver at `depth`.
fn iterative_step<G: GameAdapter>(
    alg: Algorithm,
    s: &mut Searcher<G>,
    depth: u32,
    params: &DriverParams,
) -> Result<DriverResult, SearchError> {
    s.table_mut().clear_generation();
    run_algorithm(alg, s, depth, params)
}

fn ratio(metric: u64, baseline: u64) -> f64 {
    match (metric, baseline) {
        (0, 0) => 1.0,
        (_, 0) => f64::INFINITY,
        (m, b) => m as f64 / b as f64,
    }
}

/// Writes a header and one row per record, in the order given.
pub fn emit_csv(records: &[BenchRecord], path: &Path) -> Result<(), BenchError> {
    let err = |source| BenchError::Csv {
        path: path.display().to_string(),
        source,
    };
    let file = File::create(path).map_err(|e| err(e.into()))?;
    write_csv(records, file).map_err(err)
}

pub fn write_csv<W: std::io::Write>(records: &[BenchRecord], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_fields())?;
    }
    w.flush()?;
    Ok(())
}
