//! Node-expanding procedures.
//!
//! [`Searcher::mt_alphabeta`] is fail-soft Alpha-Beta backed by the
//! transposition table: it answers from stored bounds when they decide the
//! window and records a one- or two-sided bound after every search. Drivers
//! call it repeatedly with null windows. [`Searcher::plain_alphabeta`] is the
//! same procedure without memory and [`Searcher::negascout`] the null-window
//! scouting variant sharing the table.

use std::time::{Duration, Instant};

use crate::error::SearchError;
use crate::model::{BoundPair, GameAdapter, Value, Window, INF};
use crate::ttable::{MoveIndex, ReplacementPolicy, TableStats, TranspositionTable, TtFault};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Leaf evaluations (number of bottom positions).
    pub nbp: u64,
    /// Every node visit, including visits answered by a table cutoff.
    pub total_nodes: u64,
    pub tt_cutoffs: u64,
    /// Root-level Alpha-Beta invocations.
    pub ab_calls: u64,
    pub elapsed: Duration,
}

/// Keys of evaluated leaves, in evaluation order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LeafTrace(pub Vec<u64>);

impl LeafTrace {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn distinct(&self) -> usize {
        let mut keys = self.0.clone();
        keys.sort_unstable();
        keys.dedup();
        keys.len()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    pub tt_bits: u32,
    /// Search the table's best move before the static order.
    pub tt_move_first: bool,
    pub record_trace: bool,
    pub policy: ReplacementPolicy,
    pub fault: Option<TtFault>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            tt_bits: crate::model::SearchSpec::DEFAULT_TT_BITS,
            tt_move_first: true,
            record_trace: false,
            policy: ReplacementPolicy::DepthPreferred,
            fault: None,
        }
    }
}

impl SearchConfig {
    pub fn with_tt_bits(tt_bits: u32) -> Self {
        SearchConfig {
            tt_bits,
            ..Default::default()
        }
    }

    pub fn traced(mut self) -> Self {
        self.record_trace = true;
        self
    }
}

/// One search instance: adapter, table, counters and optional leaf trace.
pub struct Searcher<G: GameAdapter> {
    adapter: G,
    table: TranspositionTable,
    stats: SearchStats,
    trace: Option<LeafTrace>,
    tt_move_first: bool,
}

enum Flavor {
    Memory,
    Scout,
}

impl<G: GameAdapter> Searcher<G> {
    pub fn new(adapter: G, config: SearchConfig) -> Result<Self, SearchError> {
        crate::model::SearchSpec::new(0, config.tt_bits)?;
        Ok(Searcher {
            adapter,
            table: TranspositionTable::new(config.tt_bits)
                .with_policy(config.policy)
                .with_fault(config.fault),
            stats: SearchStats::default(),
            trace: config.record_trace.then(LeafTrace::default),
            tt_move_first: config.tt_move_first,
        })
    }

    pub fn adapter(&self) -> &G {
        &self.adapter
    }

    pub fn table(&self) -> &TranspositionTable {
        &self.table
    }

    pub fn table_mut(&mut self) -> &mut TranspositionTable {
        &mut self.table
    }

    pub fn table_stats(&self) -> TableStats {
        self.table.stats()
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    pub fn trace(&self) -> Option<&LeafTrace> {
        self.trace.as_ref()
    }

    pub fn take_trace(&mut self) -> Option<LeafTrace> {
        self.trace.as_mut().map(std::mem::take)
    }

    pub fn root(&self) -> G::Position {
        self.adapter.root()
    }

    /// Memory-enhanced Alpha-Beta on `pos` with window `w` to `depth` plies.
    ///
    /// The table is consulted first; a stored upper bound at or below alpha,
    /// an exact value, or a lower bound at or above beta is returned
    /// directly. Otherwise children are searched (table move first) until
    /// one fails high, and the result is stored as an upper bound, exact
    /// value or lower bound depending on where it falls in the window.
    pub fn mt_alphabeta(
        &mut self,
        pos: &G::Position,
        w: Window,
        depth: u32,
    ) -> Result<Value, SearchError> {
        let w = Window::new(w.alpha, w.beta)?;
        self.root_call(|s| s.memory_search(pos, w.alpha, w.beta, depth, Flavor::Memory))
    }

    /// NegaScout: first child with the full window, later children with a
    /// null window and a re-search when the scout fails high inside the
    /// window. Shares the table with [`Self::mt_alphabeta`].
    pub fn negascout(
        &mut self,
        pos: &G::Position,
        w: Window,
        depth: u32,
    ) -> Result<Value, SearchError> {
        let w = Window::new(w.alpha, w.beta)?;
        self.root_call(|s| s.memory_search(pos, w.alpha, w.beta, depth, Flavor::Scout))
    }

    /// Fail-soft Alpha-Beta in static order with no table.
    pub fn plain_alphabeta(
        &mut self,
        pos: &G::Position,
        w: Window,
        depth: u32,
    ) -> Result<Value, SearchError> {
        let w = Window::new(w.alpha, w.beta)?;
        self.root_call(|s| s.plain(pos, w.alpha, w.beta, depth))
    }

    fn root_call(
        &mut self,
        f: impl FnOnce(&mut Self) -> Result<Value, SearchError>,
    ) -> Result<Value, SearchError> {
        let start = Instant::now();
        self.stats.ab_calls += 1;
        let r = f(self);
        self.stats.elapsed += start.elapsed();
        r
    }

    fn is_leaf(&self, pos: &G::Position, depth: u32) -> bool {
        depth == 0 || self.adapter.is_terminal(pos, depth)
    }

    fn evaluate(&mut self, pos: &G::Position, key: u64) -> Result<Value, SearchError> {
        let value = self.adapter.evaluate(pos);
        if value <= -INF || value >= INF {
            return Err(SearchError::EvalOutOfRange { key, value });
        }
        self.stats.nbp += 1;
        if let Some(trace) = self.trace.as_mut() {
            trace.0.push(key);
        }
        Ok(value)
    }

    fn children(
        &self,
        pos: &G::Position,
        key: u64,
        depth: u32,
    ) -> Result<Vec<G::Position>, SearchError> {
        let children = self.adapter.successors(pos);
        if children.is_empty() {
            return Err(SearchError::MissingSuccessors { key, depth });
        }
        Ok(children)
    }

    fn memory_search(
        &mut self,
        pos: &G::Position,
        alpha: Value,
        beta: Value,
        depth: u32,
        flavor: Flavor,
    ) -> Result<Value, SearchError> {
        self.stats.total_nodes += 1;
        let key = self.adapter.key(pos);

        if let Some(entry) = self.table.retrieve(key, depth) {
            let b = entry.bounds;
            if b.f_plus <= alpha || b.f_plus == b.f_minus {
                self.stats.tt_cutoffs += 1;
                return Ok(b.f_plus);
            }
            if b.f_minus >= beta {
                self.stats.tt_cutoffs += 1;
                return Ok(b.f_minus);
            }
        }

        if self.is_leaf(pos, depth) {
            let g = self.evaluate(pos, key)?;
            self.table.store(key, depth, BoundPair::exact(g), None);
            return Ok(g);
        }

        let children = self.children(pos, key, depth)?;
        let tt_move = if self.tt_move_first {
            self.table
                .peek(key)
                .and_then(|e| e.best_move)
                .map(usize::from)
                .filter(|&m| m < children.len())
        } else {
            None
        };

        let mut g = -INF;
        let mut a = alpha;
        let mut best: Option<usize> = None;
        for (n, idx) in move_order(children.len(), tt_move).enumerate() {
            if g >= beta {
                break;
            }
            let child = &children[idx];
            let v = match flavor {
                Flavor::Memory => {
                    -self.memory_search(child, -beta, -a, depth - 1, Flavor::Memory)?
                }
                Flavor::Scout if n == 0 => {
                    -self.memory_search(child, -beta, -a, depth - 1, Flavor::Scout)?
                }
                Flavor::Scout => {
                    let t = -self.memory_search(child, -a - 1, -a, depth - 1, Flavor::Scout)?;
                    if a < t && t < beta {
                        -self.memory_search(child, -beta, -t, depth - 1, Flavor::Scout)?
                    } else {
                        t
                    }
                }
            };
            if v > g {
                g = v;
                best = Some(idx);
            }
            a = a.max(g);
        }

        let mut bounds = BoundPair::UNKNOWN;
        bounds.record(g, Window { alpha, beta });
        self.table
            .store(key, depth, bounds, best.map(|m| m as MoveIndex));
        Ok(g)
    }

    fn plain(
        &mut self,
        pos: &G::Position,
        alpha: Value,
        beta: Value,
        depth: u32,
    ) -> Result<Value, SearchError> {
        self.stats.total_nodes += 1;
        let key = self.adapter.key(pos);
        if self.is_leaf(pos, depth) {
            return self.evaluate(pos, key);
        }
        let children = self.children(pos, key, depth)?;
        let mut g = -INF;
        let mut a = alpha;
        for child in &children {
            if g >= beta {
                break;
            }
            g = g.max(-self.plain(child, -beta, -a, depth - 1)?);
            a = a.max(g);
        }
        Ok(g)
    }
}

fn move_order(len: usize, first: Option<usize>) -> impl Iterator<Item = usize> {
    first
        .into_iter()
        .chain((0..len).filter(move |&i| Some(i) != first))
}
