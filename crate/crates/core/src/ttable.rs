//! Direct-mapped transposition table holding a lower and an upper bound per
//! position.
//!
//! The slot index is the low `bits` bits of the key; the full key is kept
//! for verification. Repeated null-window passes rely on this table to find
//! the bounds proven by earlier passes.

use crate::model::{BoundPair, Value};

/// Index of a successor in the adapter's static order.
pub type MoveIndex = u16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TtEntry {
    pub verify_key: u64,
    pub depth: u32,
    pub bounds: BoundPair,
    pub best_move: Option<MoveIndex>,
    pub age: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TableStats {
    pub stores: u64,
    /// Stores that displaced an entry for a different key.
    pub overwrites: u64,
    /// Stores dropped because the resident entry for a different key won.
    pub rejected: u64,
    pub hits: u64,
    pub misses: u64,
    pub occupancy: u64,
}

impl TableStats {
    /// Entries lost to slot conflicts, in either direction.
    pub fn evictions(&self) -> u64 {
        self.overwrites + self.rejected
    }
}

/// What to do when a store lands on a slot owned by a different key.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReplacementPolicy {
    /// Entries from older generations are replaced first; otherwise the
    /// deeper entry wins and equal depth goes to the newcomer.
    #[default]
    DepthPreferred,
    AlwaysReplace,
}

/// Deliberate defects used to check that the verification suites catch a
/// broken table. Never enable outside of mutation testing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TtFault {
    /// Same-key merges collapse both bounds onto the newly stored bound,
    /// turning every one-sided result into a fake exact value.
    ExactOnMerge,
}

#[derive(Clone, Copy)]
struct Slot {
    key: u64,
    f_minus: Value,
    f_plus: Value,
    depth: u32,
    age: u32,
    best: MoveIndex,
    used: bool,
}

const NO_MOVE: MoveIndex = MoveIndex::MAX;

impl Slot {
    const EMPTY: Slot = Slot {
        key: 0,
        f_minus: 0,
        f_plus: 0,
        depth: 0,
        age: 0,
        best: NO_MOVE,
        used: false,
    };

    fn entry(&self) -> TtEntry {
        TtEntry {
            verify_key: self.key,
            depth: self.depth,
            bounds: BoundPair {
                f_minus: self.f_minus,
                f_plus: self.f_plus,
            },
            best_move: (self.best != NO_MOVE).then_some(self.best),
            age: self.age,
        }
    }
}

pub struct TranspositionTable {
    slots: Vec<Slot>,
    mask: u64,
    age: u32,
    policy: ReplacementPolicy,
    fault: Option<TtFault>,
    stats: TableStats,
}

impl TranspositionTable {
    /// Table with `2^bits` slots. Callers validate `bits` through
    /// [`crate::model::SearchSpec`]; this only guards against absurd sizes.
    pub fn new(bits: u32) -> Self {
        assert!(bits <= 32, "transposition table of 2^{bits} slots");
        let len = 1usize << bits;
        TranspositionTable {
            slots: vec![Slot::EMPTY; len],
            mask: (len as u64) - 1,
            age: 0,
            policy: ReplacementPolicy::default(),
            fault: None,
            stats: TableStats::default(),
        }
    }

    pub fn with_policy(mut self, policy: ReplacementPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_fault(mut self, fault: Option<TtFault>) -> Self {
        self.fault = fault;
        self
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn age(&self) -> u32 {
        self.age
    }

    pub fn stats(&self) -> TableStats {
        self.stats
    }

    fn index(&self, key: u64) -> usize {
        (key & self.mask) as usize
    }

    /// Entry for `key` if present and searched at least `required_depth`
    /// plies deep.
    pub fn retrieve(&mut self, key: u64, required_depth: u32) -> Option<TtEntry> {
        let slot = &self.slots[self.index(key)];
        if slot.used && slot.key == key && slot.depth >= required_depth {
            self.stats.hits += 1;
            Some(slot.entry())
        } else {
            self.stats.misses += 1;
            None
        }
    }

    /// Entry for `key` at any depth, without touching the counters. Used for
    /// move ordering, where a shallower entry's best move is still useful.
    pub fn peek(&self, key: u64) -> Option<TtEntry> {
        let slot = &self.slots[self.index(key)];
        (slot.used && slot.key == key).then(|| slot.entry())
    }

    /// Stores bounds for `key` searched to `depth` plies.
    ///
    /// # Panics
    ///
    /// If `bounds.f_minus > bounds.f_plus`.
    pub fn store(&mut self, key: u64, depth: u32, bounds: BoundPair, best_move: Option<MoveIndex>) {
        assert!(
            bounds.is_valid(),
            "refusing to store inverted bounds [{}, {}] for key {key:#x}",
            bounds.f_minus,
            bounds.f_plus
        );
        self.stats.stores += 1;
        let idx = self.index(key);
        let age = self.age;
        let policy = self.policy;
        let fault = self.fault;
        let slot = &mut self.slots[idx];
        let best = best_move.unwrap_or(NO_MOVE);

        if !slot.used {
            self.stats.occupancy += 1;
        } else if slot.key == key {
            if depth < slot.depth {
                // A deeper result for the same position is worth more.
                return;
            }
            if depth == slot.depth {
                let old = BoundPair {
                    f_minus: slot.f_minus,
                    f_plus: slot.f_plus,
                };
                let merged = match fault {
                    Some(TtFault::ExactOnMerge) => corrupt_merge(old, bounds),
                    None => old.intersect(&bounds).unwrap_or(bounds),
                };
                slot.f_minus = merged.f_minus;
                slot.f_plus = merged.f_plus;
                slot.age = age;
                if best != NO_MOVE {
                    slot.best = best;
                }
                return;
            }
        } else {
            let replace = match policy {
                ReplacementPolicy::AlwaysReplace => true,
                ReplacementPolicy::DepthPreferred => slot.age < age || depth >= slot.depth,
            };
            if !replace {
                self.stats.rejected += 1;
                return;
            }
            self.stats.overwrites += 1;
        }

        *slot = Slot {
            key,
            f_minus: bounds.f_minus,
            f_plus: bounds.f_plus,
            depth,
            age,
            best,
            used: true,
        };
    }

    /// Starts a new search generation. Older entries stay readable but lose
    /// slot conflicts first.
    pub fn clear_generation(&mut self) {
        self.age += 1;
    }

    pub fn entries(&self) -> impl Iterator<Item = TtEntry> + '_ {
        self.slots.iter().filter(|s| s.used).map(Slot::entry)
    }
}

fn corrupt_merge(old: BoundPair, new: BoundPair) -> BoundPair {
    let v = if new.f_minus > old.f_minus {
        new.f_minus
    } else {
        new.f_plus
    };
    BoundPair::exact(v)
}
