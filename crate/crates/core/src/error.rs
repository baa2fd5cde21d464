use thiserror::Error;

use crate::model::Value;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("invalid window <{alpha}, {beta}>: alpha must be below beta")]
    InvalidWindow { alpha: Value, beta: Value },

    #[error("invalid bound pair [{f_minus}, {f_plus}]: lower bound exceeds upper bound")]
    InvalidBounds { f_minus: Value, f_plus: Value },

    #[error("tt_bits must be in 4..=28, got {0}")]
    InvalidTtBits(u32),

    #[error("position with key {key:#018x} is not terminal at remaining depth {depth} but has no successors")]
    MissingSuccessors { key: u64, depth: u32 },

    #[error("evaluation {value} at key {key:#018x} is outside (-INF, INF)")]
    EvalOutOfRange { key: u64, value: Value },

    #[error("{driver} did not converge after {calls} Alpha-Beta calls")]
    NonConvergence { driver: &'static str, calls: u64 },

    #[error("{driver} soundness violation: {detail}")]
    Unsound {
        driver: &'static str,
        detail: String,
    },

    #[error("node budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("invalid tree configuration: {0}")]
    InvalidTreeConfig(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(String),

    #[error("unknown algorithm id `{0}`")]
    UnknownAlgorithm(String),

    #[error(
        "transposition table evicted {0} entries during a run that requires a non-evicting table"
    )]
    Evictions(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Error)]
pub enum PositionSetError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
