//! Property suites over seeded synthetic trees. Every suite is
//! deterministic for a given seed and reports the tree configuration of
//! each counterexample.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domains::synthetic::{NodeId, SyntheticTree, TreeConfig, ValueModel};
use crate::drivers::{self, run_algorithm, Algorithm, DriverParams};
use crate::error::SearchError;
use crate::model::{classify_result, minimal_tree_leaves, GameAdapter, ResultClass, Value, Window};
use crate::oracles::{brute_minimax, stockman_sss, trace_capture};
use crate::search::{SearchConfig, Searcher};
use crate::ttable::TtFault;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Equivalence,
    SssOrder,
    Dominance,
    MinimalTree,
    NullWindow,
    MtdExactGuess,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Equivalence,
        Suite::SssOrder,
        Suite::Dominance,
        Suite::MinimalTree,
        Suite::NullWindow,
        Suite::MtdExactGuess,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Suite::Equivalence => "equivalence",
            Suite::SssOrder => "sss-order",
            Suite::Dominance => "dominance",
            Suite::MinimalTree => "minimal-tree",
            Suite::NullWindow => "null-window",
            Suite::MtdExactGuess => "mtd-exact-guess",
        }
    }

    /// Number of cases run when no count is given: trees for the tree
    /// suites, calls for `null-window`, trees per grid cell for
    /// `minimal-tree`.
    pub fn default_count(&self) -> usize {
        match self {
            Suite::Equivalence => 1000,
            Suite::SssOrder | Suite::Dominance => 200,
            Suite::MinimalTree => 3,
            Suite::NullWindow => 100_000,
            Suite::MtdExactGuess => 100,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Suite {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.id() == s)
            .ok_or_else(|| SearchError::InvalidArgument(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    pub count: Option<usize>,
    /// Table defect injected into every search, for mutation testing.
    pub fault: Option<TtFault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 1995,
            count: None,
            fault: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub config: TreeConfig,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub suite: Suite,
    pub cases: usize,
    pub checks: u64,
    pub failures: Vec<Counterexample>,
    /// Free-form measurements worth printing alongside the verdict.
    pub notes: Vec<String>,
}

impl VerifyReport {
    fn new(suite: Suite) -> Self {
        VerifyReport {
            suite,
            cases: 0,
            checks: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, config: &TreeConfig, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(Counterexample {
                config: *config,
                detail: detail(),
            });
        }
    }

    fn error(&mut self, config: &TreeConfig, err: SearchError) {
        self.checks += 1;
        self.failures.push(Counterexample {
            config: *config,
            detail: format!("error: {err}"),
        });
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} ({} cases, {} checks, {} failures)",
            self.suite,
            if self.passed() { "PASS" } else { "FAIL" },
            self.cases,
            self.checks,
            self.failures.len()
        )?;
        for n in &self.notes {
            writeln!(f, "  {n}")?;
        }
        for c in self.failures.iter().take(20) {
            writeln!(f, "  counterexample [{}]: {}", c.config, c.detail)?;
        }
        if self.failures.len() > 20 {
            writeln!(f, "  ... {} more", self.failures.len() - 20)?;
        }
        Ok(())
    }
}

/// Draws `count` tree configurations with widths and depths from the given
/// ranges, both value models and ordering qualities 0.5, 0.9 and 1.0.
pub fn tree_suite(
    seed: u64,
    count: usize,
    widths: std::ops::RangeInclusive<u32>,
    depths: std::ops::RangeInclusive<u32>,
) -> Vec<TreeConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let model = if i % 2 == 0 {
                ValueModel::EdgeDelta
            } else {
                ValueModel::IidLeaf
            };
            TreeConfig {
                width: rng.gen_range(widths.clone()),
                depth: rng.gen_range(depths.clone()),
                seed: rng.gen(),
                model,
                ordering: *[0.5, 0.9, 1.0].choose(&mut rng).unwrap(),
                range: *[10, 100].choose(&mut rng).unwrap(),
            }
        })
        .collect()
}

pub fn run_verify(suite: Suite, opts: &VerifyOptions) -> VerifyReport {
    let count = opts.count.unwrap_or_else(|| suite.default_count());
    match suite {
        Suite::Equivalence => equivalence(opts, count),
        Suite::SssOrder => sss_order(opts, count),
        Suite::Dominance => dominance(opts, count),
        Suite::MinimalTree => minimal_tree(opts, count),
        Suite::NullWindow => null_window(opts, count),
        Suite::MtdExactGuess => mtd_exact_guess(opts, count),
    }
}

fn config_for(tree: &SyntheticTree, opts: &VerifyOptions) -> SearchConfig {
    SearchConfig {
        fault: opts.fault,
        ..SearchConfig::with_tt_bits(tree.non_evicting_tt_bits())
    }
}

/// Every algorithm returns the brute-force value; driver bound histories
/// behave as their loops promise.
fn equivalence(opts: &VerifyOptions, count: usize) -> VerifyReport {
    let mut report = VerifyReport::new(Suite::Equivalence);
    let mut mtd_calls = Vec::new();
    for cfg in tree_suite(opts.seed, count, 2..=5, 2..=8) {
        report.cases += 1;
        let tree = match SyntheticTree::generate(&cfg) {
            Ok(t) => t,
            Err(e) => {
                report.error(&cfg, e);
                continue;
            }
        };
        let truth = match brute_minimax(&tree, &tree.root(), cfg.depth) {
            Ok(v) => v,
            Err(e) => {
                report.error(&cfg, e);
                continue;
            }
        };
        for alg in Algorithm::ALL {
            let mut s = match Searcher::new(&tree, config_for(&tree, opts)) {
                Ok(s) => s,
                Err(e) => {
                    report.error(&cfg, e);
                    continue;
                }
            };
            let r = match run_algorithm(alg, &mut s, cfg.depth, &DriverParams::default()) {
                Ok(r) => r,
                Err(e) => {
                    report.error(&cfg, e);
                    continue;
                }
            };
            report.check(r.value == truth, &cfg, || {
                format!("{alg} returned {}, minimax is {truth}", r.value)
            });
            let gs: Vec<Value> = r.bound_history.iter().map(|b| b.g).collect();
            match alg {
                Algorithm::AbSss => report.check(
                    gs.windows(2)
                        .take(gs.len().saturating_sub(2))
                        .all(|p| p[0] > p[1]),
                    &cfg,
                    || format!("ab-sss bounds not strictly decreasing: {gs:?}"),
                ),
                Algorithm::AbDual => report.check(
                    gs.windows(2)
                        .take(gs.len().saturating_sub(2))
                        .all(|p| p[0] < p[1]),
                    &cfg,
                    || format!("ab-dual bounds not strictly increasing: {gs:?}"),
                ),
                Algorithm::MtdF => {
                    mtd_calls.push(r.ab_calls);
                    let (mut lo, mut hi) = (-crate::INF, crate::INF);
                    for step in &r.bound_history {
                        if step.class == ResultClass::FailLow {
                            hi = step.g;
                        } else {
                            lo = step.g;
                        }
                        report.check(lo <= truth && truth <= hi, &cfg, || {
                            format!("mtd-f interval [{lo}, {hi}] excludes minimax {truth}")
                        });
                    }
                }
                _ => {}
            }
        }
    }
    if !mtd_calls.is_empty() {
        mtd_calls.sort_unstable();
        report.notes.push(format!(
            "mtd-f (guess 0) Alpha-Beta calls: median {}, max {}",
            mtd_calls[mtd_calls.len() / 2],
            mtd_calls.last().unwrap()
        ));
    }
    report
}

fn order_suite(opts: &VerifyOptions, count: usize) -> Vec<TreeConfig> {
    tree_suite(opts.seed ^ 0x55, count, 2..=4, 2..=6)
}

/// AB-SSS* evaluates exactly the leaves of OPEN-list SSS*, in the same order.
fn sss_order(opts: &VerifyOptions, count: usize) -> VerifyReport {
    let mut report = VerifyReport::new(Suite::SssOrder);
    let mut lengths = 0usize;
    for cfg in order_suite(opts, count) {
        report.cases += 1;
        let outcome = (|| {
            let tree = SyntheticTree::generate(&cfg)?;
            let stockman = stockman_sss(&tree, cfg.depth)?;
            let config = SearchConfig {
                tt_move_first: false,
                ..config_for(&tree, opts).traced()
            };
            let mut s = Searcher::new(&tree, config)?;
            let r = drivers::ab_sss(&mut s, cfg.depth, DriverParams::default().max_calls)?;
            let evictions = s.table_stats().evictions();
            if evictions > 0 {
                return Err(SearchError::Evictions(evictions));
            }
            Ok((stockman, r.value, s.take_trace().unwrap_or_default()))
        })();
        match outcome {
            Ok((stockman, value, trace)) => {
                lengths += trace.len();
                report.check(value == stockman.value, &cfg, || {
                    format!(
                        "ab-sss value {value}, OPEN-list SSS* value {}",
                        stockman.value
                    )
                });
                report.check(trace == stockman.leaf_trace, &cfg, || {
                    let at = trace
                        .0
                        .iter()
                        .zip(&stockman.leaf_trace.0)
                        .position(|(a, b)| a != b);
                    format!(
                        "leaf traces differ (lengths {} vs {}, first difference at {:?})",
                        trace.len(),
                        stockman.leaf_trace.len(),
                        at
                    )
                });
            }
            Err(e) => report.error(&cfg, e),
        }
    }
    report.notes.push(format!(
        "{lengths} leaf evaluations compared, zero evictions required"
    ));
    report
}

/// AB-SSS* never evaluates a leaf that plain Alpha-Beta skips.
fn dominance(opts: &VerifyOptions, count: usize) -> VerifyReport {
    let mut report = VerifyReport::new(Suite::Dominance);
    let (mut sss_total, mut ab_total) = (0usize, 0usize);
    for cfg in order_suite(opts, count) {
        report.cases += 1;
        let outcome = (|| {
            let tree = SyntheticTree::generate(&cfg)?;
            let bits = tree.non_evicting_tt_bits();
            let sss = trace_capture(Algorithm::AbSss, &tree, cfg.depth, bits)?;
            let ab = trace_capture(Algorithm::AlphaBeta, &tree, cfg.depth, bits)?;
            Ok((sss.distinct(), ab.len()))
        })();
        match outcome {
            Ok((sss, ab)) => {
                sss_total += sss;
                ab_total += ab;
                report.check(sss <= ab, &cfg, || {
                    format!("ab-sss evaluated {sss} distinct leaves, alpha-beta {ab}")
                });
            }
            Err(e) => report.error(&cfg, e),
        }
    }
    report.notes.push(format!(
        "leaf evaluations: ab-sss {sss_total}, alpha-beta {ab_total}"
    ));
    report
}

/// Wide-window Alpha-Beta on perfectly ordered uniform trees evaluates
/// exactly the minimal tree.
fn minimal_tree(opts: &VerifyOptions, per_cell: usize) -> VerifyReport {
    let mut report = VerifyReport::new(Suite::MinimalTree);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x3e);
    for width in 1..=4u32 {
        for depth in 0..=6u32 {
            for i in 0..per_cell {
                let model = if i % 2 == 0 {
                    ValueModel::EdgeDelta
                } else {
                    ValueModel::IidLeaf
                };
                let cfg = TreeConfig::new(width, depth, rng.gen(), model, 1.0, 100);
                report.cases += 1;
                let outcome = (|| {
                    let tree = SyntheticTree::generate(&cfg)?;
                    let mut s = Searcher::new(&tree, config_for(&tree, opts))?;
                    s.plain_alphabeta(&tree.root(), Window::FULL, depth)?;
                    Ok((s.stats().nbp, minimal_tree_leaves(width as u64, depth)?))
                })();
                match outcome {
                    Ok((nbp, expected)) => report.check(nbp == expected, &cfg, || {
                        format!("alpha-beta evaluated {nbp} leaves, minimal tree has {expected}")
                    }),
                    Err(e) => report.error(&cfg, e),
                }
            }
        }
    }
    report
}

const CALLS_PER_TREE: usize = 100;

/// Null-window calls never return an exact result, and their bounds hold.
/// Calls share one table per tree, so later calls lean on stored bounds.
/// Afterwards every stored entry must bracket its node's true value.
fn null_window(opts: &VerifyOptions, calls: usize) -> VerifyReport {
    let mut report = VerifyReport::new(Suite::NullWindow);
    let trees = calls.div_ceil(CALLS_PER_TREE);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x4e);
    let mut remaining = calls;
    let (mut lows, mut highs) = (0u64, 0u64);
    for cfg in tree_suite(opts.seed ^ 0x77, trees, 2..=4, 1..=5) {
        report.cases += 1;
        let n = remaining.min(CALLS_PER_TREE);
        remaining -= n;
        let tree = match SyntheticTree::generate(&cfg) {
            Ok(t) => t,
            Err(e) => {
                report.error(&cfg, e);
                continue;
            }
        };
        let outcome = (|| {
            let truth = brute_minimax(&tree, &tree.root(), cfg.depth)?;
            let mut s = Searcher::new(&tree, config_for(&tree, opts))?;
            let (lo, hi) = tree.value_bounds();
            let mut results = Vec::with_capacity(n);
            for _ in 0..n {
                let gamma = rng.gen_range(lo - 2..=hi + 2);
                let w = Window::null_below(gamma)?;
                let g = s.mt_alphabeta(&tree.root(), w, cfg.depth)?;
                results.push((w, g));
            }
            Ok((truth, s, results))
        })();
        let (truth, searcher, results) = match outcome {
            Ok(x) => x,
            Err(e) => {
                report.error(&cfg, e);
                continue;
            }
        };
        for (w, g) in results {
            match classify_result(g, w) {
                ResultClass::Exact => {
                    report.check(false, &cfg, || format!("EXACT {g} from null window {w}"))
                }
                ResultClass::FailLow => {
                    lows += 1;
                    report.check(g >= truth, &cfg, || {
                        format!("fail low {g} below minimax {truth} for {w}")
                    })
                }
                ResultClass::FailHigh => {
                    highs += 1;
                    report.check(g <= truth, &cfg, || {
                        format!("fail high {g} above minimax {truth} for {w}")
                    })
                }
            }
        }
        for entry in searcher.table().entries() {
            let Some(node) = tree.node_by_key(entry.verify_key) else {
                report.check(false, &cfg, || {
                    format!("table key {:#x} is not a tree node", entry.verify_key)
                });
                continue;
            };
            match brute_minimax(&tree, &node, entry.depth) {
                Ok(v) => report.check(entry.bounds.contains(v), &cfg, || {
                    format!(
                        "entry for node {} at depth {} holds [{}, {}] but its value is {v}",
                        node_label(node),
                        entry.depth,
                        entry.bounds.f_minus,
                        entry.bounds.f_plus
                    )
                }),
                Err(e) => report.error(&cfg, e),
            }
        }
    }
    report.notes.push(format!(
        "{lows} fail-low and {highs} fail-high results checked"
    ));
    report
}

fn node_label(n: NodeId) -> String {
    format!("#{}", n.0)
}

/// MTD(f) given the true value as its guess needs exactly two passes.
fn mtd_exact_guess(opts: &VerifyOptions, count: usize) -> VerifyReport {
    let mut report = VerifyReport::new(Suite::MtdExactGuess);
    for cfg in tree_suite(opts.seed ^ 0x99, count, 2..=5, 2..=7) {
        report.cases += 1;
        let outcome = (|| {
            let tree = SyntheticTree::generate(&cfg)?;
            let truth = brute_minimax(&tree, &tree.root(), cfg.depth)?;
            let mut s = Searcher::new(&tree, config_for(&tree, opts))?;
            let r = drivers::mtd_f(&mut s, cfg.depth, truth, DriverParams::default().max_calls)?;
            Ok((truth, r))
        })();
        match outcome {
            Ok((truth, r)) => {
                report.check(r.value == truth, &cfg, || {
                    format!("mtd-f returned {}, minimax is {truth}", r.value)
                });
                report.check(r.ab_calls == 2, &cfg, || {
                    format!("{} Alpha-Beta calls with an exact guess", r.ab_calls)
                });
            }
            Err(e) => report.error(&cfg, e),
        }
    }
    report
}
