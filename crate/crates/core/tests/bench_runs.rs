use std::path::PathBuf;

use mtlab::domains::positions::{load_position_set, othello_game_positions, PositionSource};
use mtlab::domains::{TreeConfig, ValueModel};
use mtlab::harness::bench::{emit_csv, run_bench, BenchError, Metric, RunConfig, CSV_HEADER};
use mtlab::Algorithm;

fn shipped() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/othello-20.txt")
}

fn mixed_positions() -> Vec<PositionSource> {
    let mut set: Vec<PositionSource> = othello_game_positions(6, 3)
        .into_iter()
        .map(PositionSource::Othello)
        .collect();
    set.push(PositionSource::Synthetic(TreeConfig::new(
        4,
        6,
        42,
        ValueModel::EdgeDelta,
        0.9,
        100,
    )));
    set.push(PositionSource::Synthetic(TreeConfig::new(
        3,
        6,
        7,
        ValueModel::IidLeaf,
        0.5,
        50,
    )));
    set
}

#[test]
fn shipped_set_is_the_generated_sample() {
    let set = load_position_set(shipped()).unwrap();
    let expected: Vec<PositionSource> = othello_game_positions(6, 20)
        .into_iter()
        .map(PositionSource::Othello)
        .collect();
    assert_eq!(set, expected);
}

#[test]
fn counters_grow_with_depth_and_mtd_f_needs_two_calls() {
    let cfg = RunConfig {
        tt_bits: 18,
        ..RunConfig::new(Algorithm::ALL.to_vec(), mixed_positions(), 6)
    };
    let report = run_bench(&cfg).unwrap();
    assert!(report.diagnostics.is_empty());
    assert_eq!(report.records.len(), 5 * 8 * 6);
    for run in report.records.chunks(6) {
        assert!(run
            .iter()
            .all(|r| r.position_id == run[0].position_id && r.algorithm == run[0].algorithm));
        for pair in run.windows(2) {
            assert_eq!(pair[1].depth, pair[0].depth + 1);
            assert!(pair[1].nbp_cumulative >= pair[0].nbp_cumulative);
            assert!(pair[1].total_nodes_cumulative >= pair[0].total_nodes_cumulative);
            assert!(pair[1].tt_stores >= pair[0].tt_stores);
            assert!(pair[1].tt_hits >= pair[0].tt_hits);
        }
        if run[0].algorithm == Algorithm::MtdF {
            assert!(run.iter().all(|r| r.ab_calls >= 2));
        }
        if run[0].algorithm == Algorithm::BASELINE {
            assert!(run.iter().all(|r| r.ratio_vs_baseline == 1.0));
        }
    }
}

#[test]
fn total_metric_uses_node_counts() {
    let mut cfg = RunConfig::new(
        vec![Algorithm::NegaScout],
        mixed_positions()[..1].to_vec(),
        4,
    );
    cfg.metric = Metric::Total;
    let report = run_bench(&cfg).unwrap();
    let (ns, base): (Vec<_>, Vec<_>) = report
        .records
        .iter()
        .partition(|r| r.algorithm == Algorithm::NegaScout);
    for (a, b) in ns.iter().zip(&base) {
        let expected = a.total_nodes_cumulative as f64 / b.total_nodes_cumulative as f64;
        assert!((a.ratio_vs_baseline - expected).abs() < 1e-12);
    }
}

fn without_elapsed(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f.remove(10);
            f.join(",")
        })
        .collect()
}

#[test]
fn reruns_are_identical_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        tt_bits: 16,
        seed: 99,
        ..RunConfig::new(
            vec![Algorithm::MtdF, Algorithm::AbSss],
            mixed_positions(),
            5,
        )
    };
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    emit_csv(&run_bench(&cfg).unwrap().records, &a).unwrap();
    let serial = RunConfig {
        parallel: false,
        ..cfg
    };
    emit_csv(&run_bench(&serial).unwrap().records, &b).unwrap();
    let (a, b) = (
        std::fs::read_to_string(a).unwrap(),
        std::fs::read_to_string(b).unwrap(),
    );
    assert_eq!(without_elapsed(&a), without_elapsed(&b));
    assert_eq!(a.lines().next().unwrap(), CSV_HEADER.join(","));
}

#[test]
fn csv_files_for_zero_and_one_records() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    emit_csv(&[], &empty).unwrap();
    assert_eq!(std::fs::read_to_string(&empty).unwrap().lines().count(), 1);

    let cfg = RunConfig::new(vec![Algorithm::MtdF], mixed_positions()[..1].to_vec(), 1);
    let records = run_bench(&cfg).unwrap().records;
    let one = dir.path().join("one.csv");
    emit_csv(&records[..1], &one).unwrap();
    let text = std::fs::read_to_string(&one).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().ends_with(",1.0000"));
}

#[test]
fn unwritable_csv_path_is_reported() {
    let err = emit_csv(&[], std::path::Path::new("/nonexistent/dir/out.csv")).unwrap_err();
    assert!(matches!(err, BenchError::Csv { .. }));
    assert!(err.to_string().starts_with("/nonexistent/dir/out.csv"));
}
