//! Values, windows, bounds and the game interface shared by every search
//! procedure in the crate.
//!
//! All procedures use negamax orientation: [`GameAdapter::evaluate`] scores a
//! position from the point of view of the side to move, and a parent's value
//! is the maximum of its negated child values.

use std::fmt;

use crate::error::SearchError;

/// Integer game score. Null windows rely on adjacent integers, so real-valued
/// evaluations are not supported.
pub type Value = i32;

/// Sentinel for "infinity". Far enough below `i32::MAX` that `INF + 1`,
/// `-INF - 1` and negation never overflow.
pub const INF: Value = 1 << 30;

/// Search window `<alpha, beta>` with `alpha < beta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub alpha: Value,
    pub beta: Value,
}

impl Window {
    /// The widest window, `<-INF, +INF>`.
    pub const FULL: Window = Window {
        alpha: -INF,
        beta: INF,
    };

    pub fn new(alpha: Value, beta: Value) -> Result<Self, SearchError> {
        if alpha >= beta {
            return Err(SearchError::InvalidWindow { alpha, beta });
        }
        Ok(Window { alpha, beta })
    }

    /// Null window `<gamma - 1, gamma>`, the shape every MT driver uses.
    pub fn null_below(gamma: Value) -> Result<Self, SearchError> {
        Window::new(gamma.saturating_sub(1), gamma)
    }

    pub fn is_null(&self) -> bool {
        self.beta - self.alpha == 1
    }

    pub fn negated(&self) -> Window {
        Window {
            alpha: -self.beta,
            beta: -self.alpha,
        }
    }

    pub fn contains(&self, inner: &Window) -> bool {
        self.alpha <= inner.alpha && inner.beta <= self.beta
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", fmt_value(self.alpha), fmt_value(self.beta))
    }
}

/// Formats sentinels as `+INF`/`-INF` and everything else as a plain integer.
pub fn fmt_value(v: Value) -> String {
    match v {
        INF => "+INF".to_string(),
        v if v == -INF => "-INF".to_string(),
        v => v.to_string(),
    }
}

/// A lower bound `f_minus` and an upper bound `f_plus` on a minimax value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoundPair {
    pub f_minus: Value,
    pub f_plus: Value,
}

impl BoundPair {
    /// Nothing known: `[-INF, +INF]`.
    pub const UNKNOWN: BoundPair = BoundPair {
        f_minus: -INF,
        f_plus: INF,
    };

    pub fn new(f_minus: Value, f_plus: Value) -> Result<Self, SearchError> {
        if f_minus > f_plus {
            return Err(SearchError::InvalidBounds { f_minus, f_plus });
        }
        Ok(BoundPair { f_minus, f_plus })
    }

    pub fn exact(v: Value) -> Self {
        BoundPair {
            f_minus: v,
            f_plus: v,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.f_minus == self.f_plus
    }

    pub fn is_valid(&self) -> bool {
        self.f_minus <= self.f_plus
    }

    pub fn contains(&self, v: Value) -> bool {
        self.f_minus <= v && v <= self.f_plus
    }

    /// Tightest pair implied by both, or `None` when they are disjoint.
    pub fn intersect(&self, other: &BoundPair) -> Option<BoundPair> {
        let merged = BoundPair {
            f_minus: self.f_minus.max(other.f_minus),
            f_plus: self.f_plus.min(other.f_plus),
        };
        merged.is_valid().then_some(merged)
    }

    /// Records the outcome `g` of a search with window `w`, exactly as the
    /// transposition-table update after an Alpha-Beta call: a fail low sets
    /// the upper bound, a fail high the lower bound, and an interior result
    /// both.
    pub fn record(&mut self, g: Value, w: Window) {
        match classify_result(g, w) {
            ResultClass::FailLow => self.f_plus = g,
            ResultClass::Exact => {
                self.f_plus = g;
                self.f_minus = g;
            }
            ResultClass::FailHigh => self.f_minus = g,
        }
    }
}

/// Knuth-Moore classification of an Alpha-Beta return value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResultClass {
    /// `alpha < g < beta`: `g` is the minimax value.
    Exact,
    /// `g <= alpha`: `g` is an upper bound.
    FailLow,
    /// `g >= beta`: `g` is a lower bound.
    FailHigh,
}

impl fmt::Display for ResultClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResultClass::Exact => "EXACT",
            ResultClass::FailLow => "FAIL_LOW",
            ResultClass::FailHigh => "FAIL_HIGH",
        })
    }
}

pub fn classify_result(g: Value, w: Window) -> ResultClass {
    if g <= w.alpha {
        ResultClass::FailLow
    } else if g >= w.beta {
        ResultClass::FailHigh
    } else {
        ResultClass::Exact
    }
}

/// Leaf count of the minimal tree of a uniform tree of width `w` and depth
/// `d`: `w^floor(d/2) + w^ceil(d/2) - 1`.
pub fn minimal_tree_leaves(w: u64, d: u32) -> Result<u64, SearchError> {
    if w == 0 {
        return Err(SearchError::InvalidTreeConfig(
            "width must be at least 1".into(),
        ));
    }
    let overflow = || SearchError::Overflow(format!("minimal_tree_leaves({w}, {d})"));
    let low = w.checked_pow(d / 2).ok_or_else(overflow)?;
    let high = w.checked_pow(d.div_ceil(2)).ok_or_else(overflow)?;
    Ok(low.checked_add(high).ok_or_else(overflow)? - 1)
}

/// A game as seen by the search procedures.
///
/// Successor order is the static move ordering and must be deterministic.
/// Keys identify positions in the transposition table; the full key is
/// verified on every probe.
pub trait GameAdapter {
    type Position: Clone;

    fn root(&self) -> Self::Position;

    fn successors(&self, pos: &Self::Position) -> Vec<Self::Position>;

    /// Score from the side to move's point of view. Must lie strictly
    /// inside `(-INF, INF)`.
    fn evaluate(&self, pos: &Self::Position) -> Value;

    /// True when `remaining_depth == 0` or the game is over at `pos`.
    fn is_terminal(&self, pos: &Self::Position, remaining_depth: u32) -> bool;

    fn key(&self, pos: &Self::Position) -> u64;

    fn max_branching(&self) -> usize;

    /// Bounds on every value `evaluate` can return. Used as the starting
    /// interval for bisection.
    fn value_bounds(&self) -> (Value, Value) {
        (-INF + 1, INF - 1)
    }

    /// Half-width of the aspiration window used around the previous score.
    fn aspiration_delta(&self) -> Value {
        1
    }
}

impl<G: GameAdapter + ?Sized> GameAdapter for &G {
    type Position = G::Position;

    fn root(&self) -> Self::Position {
        (**self).root()
    }
    fn successors(&self, pos: &Self::Position) -> Vec<Self::Position> {
        (**self).successors(pos)
    }
    fn evaluate(&self, pos: &Self::Position) -> Value {
        (**self).evaluate(pos)
    }
    fn is_terminal(&self, pos: &Self::Position, remaining_depth: u32) -> bool {
        (**self).is_terminal(pos, remaining_depth)
    }
    fn key(&self, pos: &Self::Position) -> u64 {
        (**self).key(pos)
    }
    fn max_branching(&self) -> usize {
        (**self).max_branching()
    }
    fn value_bounds(&self) -> (Value, Value) {
        (**self).value_bounds()
    }
    fn aspiration_delta(&self) -> Value {
        (**self).aspiration_delta()
    }
}

/// Depth and table size for one search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchSpec {
    pub depth: u32,
    pub tt_bits: u32,
}

impl SearchSpec {
    pub const MIN_TT_BITS: u32 = 4;
    pub const MAX_TT_BITS: u32 = 28;
    pub const DEFAULT_TT_BITS: u32 = 21;

    pub fn new(depth: u32, tt_bits: u32) -> Result<Self, SearchError> {
        if !(Self::MIN_TT_BITS..=Self::MAX_TT_BITS).contains(&tt_bits) {
            return Err(SearchError::InvalidTtBits(tt_bits));
        }
        Ok(SearchSpec { depth, tt_bits })
    }
}
