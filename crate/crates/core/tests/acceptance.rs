//! Headline acceptance criteria. Prints one PASS/FAIL line per criterion,
//! bypassing output capture so the lines show up in plain `cargo test` runs.

use std::io::Write;
use std::path::PathBuf;

use mtlab::domains::positions::load_position_set;
use mtlab::harness::bench::{run_bench, BenchRecord, RunConfig};
use mtlab::harness::verify::{run_verify, Suite, VerifyOptions, VerifyReport};
use mtlab::Algorithm;

const OTHELLO_DEPTH: u32 = 8;
const OTHELLO_TT_BITS: u32 = 21;

struct Verdicts {
    failed: Vec<&'static str>,
}

impl Verdicts {
    fn line(&mut self, name: &'static str, pass: bool, detail: String) {
        if !pass {
            self.failed.push(name);
        }
        let verdict = if pass { "PASS" } else { "FAIL" };
        // Written to the raw handle: libtest only captures the print macros.
        #[allow(clippy::explicit_write)]
        writeln!(std::io::stderr(), "acceptance {verdict} {name}: {detail}").unwrap();
    }

    fn suite(&mut self, name: &'static str, report: &VerifyReport) {
        let mut detail = format!(
            "{} cases, {} checks, {} failures",
            report.cases,
            report.checks,
            report.failures.len()
        );
        for n in &report.notes {
            detail.push_str("; ");
            detail.push_str(n);
        }
        if let Some(c) = report.failures.first() {
            detail.push_str(&format!(
                "; first counterexample [{}]: {}",
                c.config, c.detail
            ));
        }
        self.line(name, report.passed(), detail);
    }
}

fn median(mut xs: Vec<u64>) -> u64 {
    xs.sort_unstable();
    xs[xs.len() / 2]
}

fn calls(records: &[BenchRecord], alg: Algorithm, depth: Option<u32>) -> Vec<u64> {
    records
        .iter()
        .filter(|r| r.algorithm == alg && depth.is_none_or(|d| r.depth == d))
        .map(|r| r.ab_calls)
        .collect()
}

fn histogram(xs: &[u64]) -> String {
    let mut counts = std::collections::BTreeMap::new();
    for x in xs {
        *counts.entry(*x).or_insert(0) += 1;
    }
    counts
        .iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

#[test]
fn primary_criteria() {
    let mut v = Verdicts { failed: Vec::new() };
    let opts = VerifyOptions::default();

    let equivalence = run_verify(
        Suite::Equivalence,
        &VerifyOptions {
            count: Some(1000),
            ..opts
        },
    );
    v.suite(
        "equivalence (1000 trees, 8 algorithms = minimax)",
        &equivalence,
    );

    let sss_order = run_verify(
        Suite::SssOrder,
        &VerifyOptions {
            count: Some(200),
            ..opts
        },
    );
    v.suite("sss-order (200 trees, identical leaf traces)", &sss_order);

    let dominance = run_verify(
        Suite::Dominance,
        &VerifyOptions {
            count: Some(200),
            ..opts
        },
    );
    v.suite(
        "dominance (200 trees, ab-sss leaves <= alpha-beta leaves)",
        &dominance,
    );

    let minimal = run_verify(Suite::MinimalTree, &opts);
    v.suite("minimal-tree (w <= 4, d <= 6, perfect ordering)", &minimal);

    let null = run_verify(
        Suite::NullWindow,
        &VerifyOptions {
            count: Some(100_000),
            ..opts
        },
    );
    v.suite("null-window (100000 calls)", &null);

    let exact = run_verify(
        Suite::MtdExactGuess,
        &VerifyOptions {
            count: Some(100),
            ..opts
        },
    );
    v.suite("mtd-exact-guess (100 trees, 2 calls)", &exact);

    let positions =
        load_position_set(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/othello-20.txt"))
            .unwrap();
    assert_eq!(positions.len(), 20);
    let cfg = RunConfig {
        tt_bits: OTHELLO_TT_BITS,
        ..RunConfig::new(Algorithm::ALL.to_vec(), positions, OTHELLO_DEPTH)
    };
    let report = run_bench(&cfg).expect("all algorithms agree on every Othello position");
    assert!(report.diagnostics.is_empty(), "{:?}", report.diagnostics);
    let records = &report.records;

    let mtd_all = calls(records, Algorithm::MtdF, None);
    let mtd_median = median(mtd_all.clone());
    v.line(
        "mtd-f call count (Othello, 20 positions, depths 1-8)",
        (2..=8).contains(&mtd_median),
        format!(
            "median {mtd_median} per iteration (band 2..=8; within 3..=6: {}); distribution {}",
            (3..=6).contains(&mtd_median),
            histogram(&mtd_all)
        ),
    );

    let finals: Vec<&BenchRecord> = records
        .iter()
        .filter(|r| r.depth == OTHELLO_DEPTH && r.algorithm == Algorithm::MtdF)
        .collect();
    let mean_ratio = finals.iter().map(|r| r.ratio_vs_baseline).sum::<f64>() / finals.len() as f64;
    let sss_final = median(calls(records, Algorithm::AbSss, Some(OTHELLO_DEPTH)));
    let dual_final = median(calls(records, Algorithm::AbDual, Some(OTHELLO_DEPTH)));
    let mtd_final = median(calls(records, Algorithm::MtdF, Some(OTHELLO_DEPTH)));
    let sss_pooled = median(calls(records, Algorithm::AbSss, None));
    v.line(
        "directional (mtd-f NBP ratio <= 1.05, ab-sss calls >= 2x mtd-f at depth 8)",
        mean_ratio <= 1.05 && sss_final >= 2 * mtd_final,
        format!(
            "mean cumulative NBP ratio mtd-f/asp-negascout {mean_ratio:.4} ({:+.1}%); \
             median calls at depth 8: ab-sss {sss_final}, ab-dual {dual_final}, mtd-f {mtd_final}; \
             pooled over depths 1-8: ab-sss {sss_pooled}, mtd-f {mtd_median}",
            (mean_ratio - 1.0) * 100.0
        ),
    );

    let evictions: Vec<u64> = records
        .iter()
        .filter(|r| r.depth == OTHELLO_DEPTH && r.algorithm == Algorithm::AbSss)
        .map(|r| r.tt_evictions)
        .collect();
    v.line(
        "tt sufficiency (order suites evict nothing; Othello depth 8 evictions reported)",
        sss_order.passed() && dominance.passed(),
        format!(
            "ab-sss at depth 8 with 2^{OTHELLO_TT_BITS} slots: {} evictions in total, at most {} per position",
            evictions.iter().sum::<u64>(),
            evictions.iter().max().unwrap()
        ),
    );

    assert!(v.failed.is_empty(), "failed criteria: {:?}", v.failed);
}
