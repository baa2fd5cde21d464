//! Reference implementations for testing: exhaustive minimax and Stockman's
//! OPEN-list SSS*. Neither shares code with the search procedures they check.

use crate::drivers::{run_algorithm, Algorithm, DriverParams};
use crate::error::SearchError;
use crate::model::{GameAdapter, Value};
use crate::search::{LeafTrace, SearchConfig, Searcher};

/// Node budget for the exhaustive oracles.
pub const ORACLE_BUDGET: u64 = 10_000_000;

/// Exact negamax value of `pos` searched `depth` plies, without pruning.
pub fn brute_minimax<G: GameAdapter>(
    adapter: &G,
    pos: &G::Position,
    depth: u32,
) -> Result<Value, SearchError> {
    let mut visited = 0u64;
    brute(adapter, pos, depth, &mut visited)
}

fn brute<G: GameAdapter>(
    adapter: &G,
    pos: &G::Position,
    depth: u32,
    visited: &mut u64,
) -> Result<Value, SearchError> {
    *visited += 1;
    if *visited > ORACLE_BUDGET {
        return Err(SearchError::BudgetExceeded {
            budget: ORACLE_BUDGET,
        });
    }
    if depth == 0 || adapter.is_terminal(pos, depth) {
        return Ok(adapter.evaluate(pos));
    }
    let children = adapter.successors(pos);
    if children.is_empty() {
        return Err(SearchError::MissingSuccessors {
            key: adapter.key(pos),
            depth,
        });
    }
    let mut best = Value::MIN;
    for c in &children {
        best = best.max(-brute(adapter, c, depth - 1, visited)?);
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub value: Value,
    pub leaf_trace: LeafTrace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Live,
    Solved,
}

#[derive(Clone, Copy, Debug)]
struct OpenItem {
    node: usize,
    status: Status,
    merit: Value,
}

struct TreeNode<P> {
    pos: P,
    parent: Option<usize>,
    /// Child indices from the root; orders nodes left to right.
    path: Vec<u32>,
    remaining: u32,
    children: Option<Vec<usize>>,
}

impl<P> TreeNode<P> {
    /// MAX nodes sit at even plies.
    fn is_max(&self) -> bool {
        self.path.len().is_multiple_of(2)
    }
}

/// Stockman's SSS* with an explicit OPEN list, in MAX-root terms.
///
/// Items are `(node, status, merit)`. The item with the highest merit is
/// expanded next; equal merits go to the leftmost node. The tree must be
/// free of transpositions.
pub fn stockman_sss<G: GameAdapter>(adapter: &G, depth: u32) -> Result<OracleResult, SearchError> {
    let mut nodes: Vec<TreeNode<G::Position>> = vec![TreeNode {
        pos: adapter.root(),
        parent: None,
        path: Vec::new(),
        remaining: depth,
        children: None,
    }];
    let mut open = vec![OpenItem {
        node: 0,
        status: Status::Live,
        merit: crate::model::INF,
    }];
    let mut trace = LeafTrace::default();

    loop {
        if nodes.len() as u64 > ORACLE_BUDGET {
            return Err(SearchError::BudgetExceeded {
                budget: ORACLE_BUDGET,
            });
        }
        let pick = (0..open.len())
            .max_by(|&a, &b| {
                open[a]
                    .merit
                    .cmp(&open[b].merit)
                    .then_with(|| nodes[open[b].node].path.cmp(&nodes[open[a].node].path))
            })
            .ok_or_else(|| SearchError::InvalidArgument("OPEN list ran empty".into()))?;
        let OpenItem {
            node,
            status,
            merit,
        } = open.swap_remove(pick);

        match status {
            Status::Live => {
                let n = &nodes[node];
                if n.remaining == 0 || adapter.is_terminal(&n.pos, n.remaining) {
                    let eval = adapter.evaluate(&n.pos);
                    let value = if n.is_max() { eval } else { -eval };
                    trace.0.push(adapter.key(&n.pos));
                    open.push(OpenItem {
                        node,
                        status: Status::Solved,
                        merit: merit.min(value),
                    });
                    continue;
                }
                let kids = expand(adapter, &mut nodes, node)?;
                if nodes[node].is_max() {
                    open.extend(kids.iter().map(|&c| OpenItem {
                        node: c,
                        status: Status::Live,
                        merit,
                    }));
                } else {
                    open.push(OpenItem {
                        node: kids[0],
                        status: Status::Live,
                        merit,
                    });
                }
            }
            Status::Solved => {
                let Some(parent) = nodes[node].parent else {
                    return Ok(OracleResult {
                        value: merit,
                        leaf_trace: trace,
                    });
                };
                if !nodes[node].is_max() {
                    // A solved MIN child solves its MAX parent outright.
                    let prefix = nodes[parent].path.clone();
                    open.retain(|it| !is_strict_descendant(&nodes[it.node].path, &prefix));
                    open.push(OpenItem {
                        node: parent,
                        status: Status::Solved,
                        merit,
                    });
                } else {
                    let siblings = nodes[parent].children.as_ref().expect("parent expanded");
                    let at = siblings
                        .iter()
                        .position(|&c| c == node)
                        .expect("child of its parent");
                    let next = match siblings.get(at + 1) {
                        Some(&b) => OpenItem {
                            node: b,
                            status: Status::Live,
                            merit,
                        },
                        None => OpenItem {
                            node: parent,
                            status: Status::Solved,
                            merit,
                        },
                    };
                    open.push(next);
                }
            }
        }
    }
}

fn is_strict_descendant(path: &[u32], ancestor: &[u32]) -> bool {
    path.len() > ancestor.len() && path.starts_with(ancestor)
}

fn expand<G: GameAdapter>(
    adapter: &G,
    nodes: &mut Vec<TreeNode<G::Position>>,
    id: usize,
) -> Result<Vec<usize>, SearchError> {
    if let Some(kids) = &nodes[id].children {
        return Ok(kids.clone());
    }
    let succ = adapter.successors(&nodes[id].pos);
    if succ.is_empty() {
        return Err(SearchError::MissingSuccessors {
            key: adapter.key(&nodes[id].pos),
            depth: nodes[id].remaining,
        });
    }
    let mut kids = Vec::with_capacity(succ.len());
    for (i, pos) in succ.into_iter().enumerate() {
        let mut path = nodes[id].path.clone();
        path.push(i as u32);
        nodes.push(TreeNode {
            pos,
            parent: Some(id),
            path,
            remaining: nodes[id].remaining - 1,
            children: None,
        });
        kids.push(nodes.len() - 1);
    }
    nodes[id].children = Some(kids.clone());
    Ok(kids)
}

/// Leaf evaluation sequence of one full run of `alg` with a fresh table of
/// `2^tt_bits` slots. Children are searched in static order, as the OPEN-list
/// oracle does; the table's best move is not tried first. Fails if the table
/// evicts anything, since order comparisons are meaningless once bounds are
/// lost.
pub fn trace_capture<G: GameAdapter>(
    alg: Algorithm,
    adapter: &G,
    depth: u32,
    tt_bits: u32,
) -> Result<LeafTrace, SearchError> {
    let config = SearchConfig {
        tt_move_first: false,
        ..SearchConfig::with_tt_bits(tt_bits).traced()
    };
    let mut s = Searcher::new(adapter, config)?;
    run_algorithm(alg, &mut s, depth, &DriverParams::default())?;
    let evictions = s.table_stats().evictions();
    if evictions > 0 {
        return Err(SearchError::Evictions(evictions));
    }
    Ok(s.take_trace().unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::synthetic::{Shape, SyntheticTree, TreeConfig, ValueModel};
    use crate::model::minimal_tree_leaves;

    fn small_tree() -> SyntheticTree {
        SyntheticTree::from_leaves(2, 2, &[3, 5, 2, 1]).unwrap()
    }

    fn values(t: &SyntheticTree, trace: &LeafTrace) -> Vec<Value> {
        trace
            .0
            .iter()
            .map(|k| t.leaf_value_by_key(*k).unwrap())
            .collect()
    }

    #[test]
    fn brute_force_examples() {
        let t = small_tree();
        assert_eq!(brute_minimax(&t, &t.root(), 2).unwrap(), 3);
        let leaf = SyntheticTree::from_shape(&Shape::leaf(-12)).unwrap();
        assert_eq!(brute_minimax(&leaf, &leaf.root(), 4).unwrap(), -12);
        let flat = SyntheticTree::from_leaves(3, 3, &[6; 27]).unwrap();
        assert_eq!(brute_minimax(&flat, &flat.root(), 3).unwrap(), 6);
    }

    /// Unbounded binary tree; every position scores zero.
    struct Binary;

    impl GameAdapter for Binary {
        type Position = u64;
        fn root(&self) -> u64 {
            1
        }
        fn successors(&self, p: &u64) -> Vec<u64> {
            vec![p * 2, p * 2 + 1]
        }
        fn evaluate(&self, _: &u64) -> Value {
            0
        }
        fn is_terminal(&self, _: &u64, remaining: u32) -> bool {
            remaining == 0
        }
        fn key(&self, p: &u64) -> u64 {
            *p
        }
        fn max_branching(&self) -> usize {
            2
        }
    }

    #[test]
    fn brute_force_budget() {
        assert!(matches!(
            brute_minimax(&Binary, &1, 30),
            Err(SearchError::BudgetExceeded { .. })
        ));
        assert_eq!(brute_minimax(&Binary, &1, 10).unwrap(), 0);
    }

    #[test]
    fn stockman_on_small_tree() {
        let t = small_tree();
        let r = stockman_sss(&t, 2).unwrap();
        assert_eq!(r.value, 3);
        assert_eq!(values(&t, &r.leaf_trace), vec![3, 2, 5]);
    }

    #[test]
    fn stockman_single_leaf() {
        let t = SyntheticTree::from_shape(&Shape::leaf(4)).unwrap();
        let r = stockman_sss(&t, 3).unwrap();
        assert_eq!(r.value, 4);
        assert_eq!(r.leaf_trace.0, vec![t.key(&t.root())]);
    }

    #[test]
    fn stockman_on_ordered_tree_visits_minimal_tree() {
        let t = SyntheticTree::generate(&TreeConfig::new(2, 2, 11, ValueModel::EdgeDelta, 1.0, 50))
            .unwrap();
        let r = stockman_sss(&t, 2).unwrap();
        assert_eq!(
            r.leaf_trace.len() as u64,
            minimal_tree_leaves(2, 2).unwrap()
        );
        assert_eq!(r.value, brute_minimax(&t, &t.root(), 2).unwrap());
    }

    #[test]
    fn stockman_agrees_with_brute_force() {
        for seed in 0..40 {
            let cfg = TreeConfig::new(
                2 + (seed % 3) as u32,
                1 + (seed % 5) as u32,
                seed,
                ValueModel::IidLeaf,
                0.5,
                20,
            );
            let t = SyntheticTree::generate(&cfg).unwrap();
            let r = stockman_sss(&t, cfg.depth).unwrap();
            assert_eq!(
                r.value,
                brute_minimax(&t, &t.root(), cfg.depth).unwrap(),
                "{cfg}"
            );
        }
    }

    #[test]
    fn trace_capture_examples() {
        let t = small_tree();
        let sss = trace_capture(Algorithm::AbSss, &t, 2, 8).unwrap();
        assert_eq!(values(&t, &sss), vec![3, 2, 5]);
        let ab = trace_capture(Algorithm::AlphaBeta, &t, 2, 8).unwrap();
        assert_eq!(values(&t, &ab), vec![3, 5, 2]);
        let leaf = SyntheticTree::from_shape(&Shape::leaf(1)).unwrap();
        for alg in Algorithm::ALL {
            assert_eq!(trace_capture(alg, &leaf, 2, 4).unwrap().len(), 1, "{alg}");
        }
    }

    #[test]
    fn trace_capture_refuses_evicting_tables() {
        let t = SyntheticTree::generate(&TreeConfig::new(3, 5, 2, ValueModel::IidLeaf, 0.5, 50))
            .unwrap();
        assert!(matches!(
            trace_capture(Algorithm::AbSss, &t, 5, 4),
            Err(SearchError::Evictions(_))
        ));
    }
}
