//! A laboratory for minimax search built on memory-enhanced null-window
//! Alpha-Beta.
//!
//! The building block is [`search::Searcher::mt_alphabeta`], Alpha-Beta
//! backed by a transposition table that stores a lower and an upper bound
//! per position. The [`drivers`] call it repeatedly at the root with
//! different windows, which yields SSS* ([`drivers::ab_sss`]), DUAL*
//! ([`drivers::ab_dual`]), MTD(f) ([`drivers::mtd_f`]) and bisection
//! ([`drivers::mtd_bi`]). Plain Alpha-Beta and (aspiration) NegaScout are
//! included as baselines, [`oracles`] holds brute-force minimax and an
//! OPEN-list SSS* for checking, and [`harness`] runs benchmarks and
//! verification suites over synthetic trees and 6x6 Othello.

pub mod domains;
pub mod drivers;
pub mod error;
pub mod harness;
pub mod model;
pub mod oracles;
pub mod search;
pub mod ttable;

pub use drivers::{Algorithm, DriverParams, DriverResult};
pub use error::{PositionSetError, SearchError};
pub use model::{
    classify_result, minimal_tree_leaves, BoundPair, GameAdapter, ResultClass, SearchSpec, Value,
    Window, INF,
};
pub use search::{LeafTrace, SearchConfig, SearchStats, Searcher};
pub use ttable::{TableStats, TranspositionTable};
