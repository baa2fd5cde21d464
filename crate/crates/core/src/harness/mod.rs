//! Benchmark runner, CSV output and the verification suites.

pub mod bench;
pub mod verify;

pub use bench::{
    emit_csv, run_bench, write_csv, BenchError, BenchRecord, BenchReport, Diagnostic, Metric,
    RunConfig,
};
pub use verify::{run_verify, Counterexample, Suite, VerifyOptions, VerifyReport};
