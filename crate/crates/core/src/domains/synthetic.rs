//! Seeded synthetic game trees.
//!
//! Trees are materialised up front so that move ordering can be controlled
//! by the true subtree values. Nodes are laid out breadth-first with
//! contiguous children. A node's key carries its breadth-first index in the
//! low 32 bits, so two nodes of one tree never share a table slot as long as
//! the table has at least as many slots as the tree has nodes.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SearchError;
use crate::model::{GameAdapter, Value, INF};

/// Largest tree [`SyntheticTree::generate`] will build.
pub const NODE_BUDGET: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ValueModel {
    /// Every node value drawn independently from `[-range, range]`.
    IidLeaf,
    /// Every edge carries a delta from `[-range, range]`; a node's value is
    /// the sum of deltas along its path, each counted for the player who
    /// made the move. Related positions get related values.
    EdgeDelta,
}

impl ValueModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ValueModel::IidLeaf => "iid",
            ValueModel::EdgeDelta => "edge",
        }
    }
}

impl FromStr for ValueModel {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "iid" => Ok(ValueModel::IidLeaf),
            "edge" => Ok(ValueModel::EdgeDelta),
            other => Err(SearchError::InvalidTreeConfig(format!(
                "unknown value model `{other}` (expected iid or edge)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeConfig {
    pub width: u32,
    pub depth: u32,
    pub seed: u64,
    pub model: ValueModel,
    /// Probability that the best child is listed first at each node.
    pub ordering: f64,
    /// Half-width of the value (or delta) distribution.
    pub range: Value,
}

impl TreeConfig {
    pub fn new(
        width: u32,
        depth: u32,
        seed: u64,
        model: ValueModel,
        ordering: f64,
        range: Value,
    ) -> Self {
        TreeConfig {
            width,
            depth,
            seed,
            model,
            ordering,
            range,
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.width == 0 {
            return Err(SearchError::InvalidTreeConfig(
                "width must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.ordering) {
            return Err(SearchError::InvalidTreeConfig(format!(
                "ordering probability {} outside [0, 1]",
                self.ordering
            )));
        }
        if self.range < 0 {
            return Err(SearchError::InvalidTreeConfig(
                "range must be non-negative".into(),
            ));
        }
        let max_abs = match self.model {
            ValueModel::IidLeaf => self.range as i64,
            ValueModel::EdgeDelta => self.range as i64 * self.depth as i64,
        };
        if max_abs >= (INF / 2) as i64 {
            return Err(SearchError::InvalidTreeConfig(format!(
                "values up to {max_abs} would approach the INF sentinel"
            )));
        }
        self.node_count().map(|_| ())
    }

    pub fn node_count(&self) -> Result<u64, SearchError> {
        let mut total: u64 = 0;
        let mut level: u64 = 1;
        for d in 0..=self.depth {
            total = total.saturating_add(level);
            if total > NODE_BUDGET {
                return Err(SearchError::BudgetExceeded {
                    budget: NODE_BUDGET,
                });
            }
            if d < self.depth {
                level = level.saturating_mul(self.width as u64);
            }
        }
        Ok(total)
    }
}

impl fmt::Display for TreeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "synthetic w={} d={} seed={} p={} model={} range={}",
            self.width,
            self.depth,
            self.seed,
            self.ordering,
            self.model.as_str(),
            self.range
        )
    }
}

impl FromStr for TreeConfig {
    type Err = SearchError;

    /// Parses `synthetic w=3 d=8 seed=42 p=0.9 model=edge range=100`. The
    /// leading `synthetic` word is optional; every field is required.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: String| SearchError::InvalidTreeConfig(m);
        let mut fields = s.split_whitespace().peekable();
        if fields.peek() == Some(&"synthetic") {
            fields.next();
        }
        let (mut w, mut d, mut seed, mut p, mut model, mut range) =
            (None, None, None, None, None, None);
        for field in fields {
            let (name, value) = field
                .split_once('=')
                .ok_or_else(|| bad(format!("expected name=value, got `{field}`")))?;
            let num = |what: &str| bad(format!("bad {what} `{value}`"));
            match name {
                "w" => w = Some(value.parse().map_err(|_| num("width"))?),
                "d" => d = Some(value.parse().map_err(|_| num("depth"))?),
                "seed" => seed = Some(value.parse().map_err(|_| num("seed"))?),
                "p" => p = Some(value.parse().map_err(|_| num("ordering probability"))?),
                "model" => model = Some(value.parse()?),
                "range" => range = Some(value.parse().map_err(|_| num("range"))?),
                other => return Err(bad(format!("unknown field `{other}`"))),
            }
        }
        let missing = |f: &str| bad(format!("missing field `{f}`"));
        let cfg = TreeConfig {
            width: w.ok_or_else(|| missing("w"))?,
            depth: d.ok_or_else(|| missing("d"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
            ordering: p.ok_or_else(|| missing("p"))?,
            model: model.ok_or_else(|| missing("model"))?,
            range: range.ok_or_else(|| missing("range"))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Explicit tree description with values in MAX-root terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Leaf(Value),
    Node(Vec<Shape>),
}

impl Shape {
    pub fn leaf(v: Value) -> Shape {
        Shape::Leaf(v)
    }

    pub fn node(children: Vec<Shape>) -> Shape {
        Shape::Node(children)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

#[derive(Clone, Copy, Debug)]
struct Node {
    first_child: u32,
    child_count: u32,
    ply: u32,
    /// Static value from MAX's (the root player's) point of view.
    value: Value,
    key: u64,
}

pub struct SyntheticTree {
    nodes: Vec<Node>,
    depth: u32,
    max_branching: usize,
    bounds: (Value, Value),
    aspiration_delta: Value,
    config: Option<TreeConfig>,
}

/// Depth-first intermediate form used while building.
struct RawTree {
    children: Vec<Vec<u32>>,
    value: Vec<Value>,
}

impl RawTree {
    fn push(&mut self, value: Value) -> u32 {
        self.children.push(Vec::new());
        self.value.push(value);
        (self.value.len() - 1) as u32
    }
}

impl SyntheticTree {
    pub fn generate(cfg: &TreeConfig) -> Result<Self, SearchError> {
        cfg.validate()?;
        let count = cfg.node_count()? as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut raw = RawTree {
            children: Vec::with_capacity(count),
            value: Vec::with_capacity(count),
        };
        let root_value = match cfg.model {
            ValueModel::IidLeaf => rng.gen_range(-cfg.range..=cfg.range),
            ValueModel::EdgeDelta => 0,
        };
        raw.push(root_value);
        grow(&mut raw, 0, 0, cfg, &mut rng);

        if cfg.width > 1 {
            let minimax = raw_minimax(&raw);
            let mut order_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
            reorder(&mut raw, &minimax, 0, cfg.ordering, &mut order_rng);
        }

        let mut tree = SyntheticTree::flatten(&raw)?;
        tree.config = Some(*cfg);
        Ok(tree)
    }

    /// Builds the tree described by `shape`. Interior nodes get static value 0.
    pub fn from_shape(shape: &Shape) -> Result<Self, SearchError> {
        fn build(raw: &mut RawTree, shape: &Shape) -> Result<u32, SearchError> {
            match shape {
                Shape::Leaf(v) => {
                    if v.abs() >= INF / 2 {
                        return Err(SearchError::InvalidTreeConfig(format!(
                            "leaf value {v} too large"
                        )));
                    }
                    Ok(raw.push(*v))
                }
                Shape::Node(children) => {
                    if children.is_empty() {
                        return Err(SearchError::InvalidTreeConfig(
                            "interior node without children".into(),
                        ));
                    }
                    let id = raw.push(0);
                    for c in children {
                        let cid = build(raw, c)?;
                        raw.children[id as usize].push(cid);
                    }
                    Ok(id)
                }
            }
        }
        let mut raw = RawTree {
            children: Vec::new(),
            value: Vec::new(),
        };
        build(&mut raw, shape)?;
        SyntheticTree::flatten(&raw)
    }

    /// Uniform tree with the given leaves in left-to-right order.
    pub fn from_leaves(width: u32, depth: u32, leaves: &[Value]) -> Result<Self, SearchError> {
        let expected = (width as u64).checked_pow(depth).unwrap_or(u64::MAX);
        if width == 0 || expected != leaves.len() as u64 {
            return Err(SearchError::InvalidTreeConfig(format!(
                "{} leaves given for a width {width} depth {depth} tree",
                leaves.len()
            )));
        }
        fn build(width: usize, depth: u32, leaves: &[Value]) -> Shape {
            if depth == 0 {
                return Shape::Leaf(leaves[0]);
            }
            let chunk = leaves.len() / width;
            Shape::Node(
                leaves
                    .chunks(chunk)
                    .map(|c| build(width, depth - 1, c))
                    .collect(),
            )
        }
        SyntheticTree::from_shape(&build(width as usize, depth, leaves))
    }

    fn flatten(raw: &RawTree) -> Result<Self, SearchError> {
        let n = raw.value.len();
        if n as u64 > NODE_BUDGET {
            return Err(SearchError::BudgetExceeded {
                budget: NODE_BUDGET,
            });
        }
        let mut nodes: Vec<Node> = Vec::with_capacity(n);
        // Breadth-first: (raw id, ply, path hash)
        let mut queue = std::collections::VecDeque::with_capacity(n);
        queue.push_back((0u32, 0u32, splitmix64(0x5eed)));
        let mut next_free: u32 = 1;
        let mut max_branching = 0;
        let mut depth = 0;
        let (mut lo, mut hi) = (Value::MAX, Value::MIN);
        let mut leaf_values: Vec<f64> = Vec::new();
        while let Some((raw_id, ply, path_hash)) = queue.pop_front() {
            let idx = nodes.len() as u32;
            let kids = &raw.children[raw_id as usize];
            let value = raw.value[raw_id as usize];
            lo = lo.min(value);
            hi = hi.max(value);
            if kids.is_empty() {
                leaf_values.push(value as f64);
            }
            nodes.push(Node {
                first_child: next_free,
                child_count: kids.len() as u32,
                ply,
                value,
                key: (path_hash & 0xffff_ffff_0000_0000) | idx as u64,
            });
            for (i, &k) in kids.iter().enumerate() {
                queue.push_back((k, ply + 1, splitmix64(path_hash ^ (i as u64 + 1))));
            }
            next_free += kids.len() as u32;
            max_branching = max_branching.max(kids.len());
            depth = depth.max(ply);
        }

        let mean = leaf_values.iter().sum::<f64>() / leaf_values.len() as f64;
        let var =
            leaf_values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / leaf_values.len() as f64;
        let aspiration_delta = ((var.sqrt() / 8.0).round() as Value).max(1);

        Ok(SyntheticTree {
            nodes,
            depth,
            max_branching,
            bounds: (lo, hi),
            aspiration_delta,
            config: None,
        })
    }

    pub fn config(&self) -> Option<&TreeConfig> {
        self.config.as_ref()
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.child_count == 0).count()
    }

    /// Smallest table size (in bits) with a slot per node.
    pub fn non_evicting_tt_bits(&self) -> u32 {
        let bits = usize::BITS - (self.nodes.len().max(2) - 1).leading_zeros();
        bits.max(crate::model::SearchSpec::MIN_TT_BITS)
    }

    pub fn ply(&self, id: NodeId) -> u32 {
        self.nodes[id.0 as usize].ply
    }

    pub fn children(&self, id: NodeId) -> impl Iterator<Item = NodeId> {
        let n = &self.nodes[id.0 as usize];
        (n.first_child..n.first_child + n.child_count).map(NodeId)
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id.0 as usize].child_count == 0
    }

    /// Static value in MAX-root terms.
    pub fn static_value(&self, id: NodeId) -> Value {
        self.nodes[id.0 as usize].value
    }

    pub fn node_by_key(&self, key: u64) -> Option<NodeId> {
        let idx = (key & 0xffff_ffff) as usize;
        (self.nodes.get(idx)?.key == key).then_some(NodeId(idx as u32))
    }

    /// MAX-root value of the leaf with this key.
    pub fn leaf_value_by_key(&self, key: u64) -> Option<Value> {
        let id = self.node_by_key(key)?;
        self.is_leaf(id).then(|| self.static_value(id))
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }
}

impl GameAdapter for SyntheticTree {
    type Position = NodeId;

    fn root(&self) -> NodeId {
        NodeId(0)
    }

    fn successors(&self, pos: &NodeId) -> Vec<NodeId> {
        self.children(*pos).collect()
    }

    fn evaluate(&self, pos: &NodeId) -> Value {
        let n = &self.nodes[pos.0 as usize];
        if n.ply.is_multiple_of(2) {
            n.value
        } else {
            -n.value
        }
    }

    fn is_terminal(&self, pos: &NodeId, remaining_depth: u32) -> bool {
        remaining_depth == 0 || self.is_leaf(*pos)
    }

    fn key(&self, pos: &NodeId) -> u64 {
        self.nodes[pos.0 as usize].key
    }

    fn max_branching(&self) -> usize {
        self.max_branching
    }

    fn value_bounds(&self) -> (Value, Value) {
        self.bounds
    }

    fn aspiration_delta(&self) -> Value {
        self.aspiration_delta
    }
}

fn grow(raw: &mut RawTree, id: u32, ply: u32, cfg: &TreeConfig, rng: &mut ChaCha8Rng) {
    if ply == cfg.depth {
        return;
    }
    let parent_value = raw.value[id as usize];
    for _ in 0..cfg.width {
        let value = match cfg.model {
            ValueModel::IidLeaf => rng.gen_range(-cfg.range..=cfg.range),
            ValueModel::EdgeDelta => {
                let delta = rng.gen_range(-cfg.range..=cfg.range);
                if ply.is_multiple_of(2) {
                    parent_value + delta
                } else {
                    parent_value - delta
                }
            }
        };
        let child = raw.push(value);
        raw.children[id as usize].push(child);
        grow(raw, child, ply + 1, cfg, rng);
    }
}

/// MAX-root minimax value of every raw node. Children always have larger
/// ids than their parent, so one reverse sweep suffices.
fn raw_minimax(raw: &RawTree) -> Vec<Value> {
    let n = raw.value.len();
    let mut ply = vec![0u32; n];
    for id in 0..n {
        for &c in &raw.children[id] {
            ply[c as usize] = ply[id] + 1;
        }
    }
    let mut mm = raw.value.clone();
    for id in (0..n).rev() {
        let kids = &raw.children[id];
        if kids.is_empty() {
            continue;
        }
        let vals = kids.iter().map(|&c| mm[c as usize]);
        mm[id] = if ply[id].is_multiple_of(2) {
            vals.max().unwrap()
        } else {
            vals.min().unwrap()
        };
    }
    mm
}

fn reorder(raw: &mut RawTree, minimax: &[Value], id: u32, p: f64, rng: &mut ChaCha8Rng) {
    let mut kids = std::mem::take(&mut raw.children[id as usize]);
    if kids.len() > 1 {
        let target = minimax[id as usize];
        let best = kids
            .iter()
            .position(|&c| minimax[c as usize] == target)
            .unwrap();
        let best_first = rng.gen_bool(p);
        let lead = if best_first {
            best
        } else {
            let others: Vec<usize> = (0..kids.len())
                .filter(|&i| minimax[kids[i] as usize] != target)
                .collect();
            others.choose(rng).copied().unwrap_or(best)
        };
        let lead = kids.remove(lead);
        kids.shuffle(rng);
        kids.insert(0, lead);
    }
    for &c in &kids {
        reorder(raw, minimax, c, p, rng);
    }
    raw.children[id as usize] = kids;
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
