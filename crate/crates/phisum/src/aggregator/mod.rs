//! Keyed accumulators with whole-map multiplication and rollback.
//!
//! An aggregator maintains a map from symbols to semiring values under three
//! updates: `set` one key, `mult`iply every value at once, and `undo` the
//! most recent updates. It also answers `get` for one key and `value`, the
//! sum over all keys, at any time. The backward pass over a failure tree
//! keeps one aggregator per tree and replays/undoes updates while walking
//! the tree, so all three variants here make every update cheap and exactly
//! reversible.
//!
//! * [`SegtreeAggregator`] works for any semiring: values live in the leaves
//!   of a segment tree whose nodes carry pending multipliers, so `mult` is
//!   one node write and `set` touches two paths' worth of nodes.
//! * [`RingAggregator`] exploits subtraction: `set` adjusts a running total,
//!   and scaling history is kept as a product sequence queried per key.
//! * [`DivisionRingAggregator`] additionally exploits inverses: one running
//!   scale factor and its inverse make every update constant time.

mod division;
mod ring;
mod segtree;

pub use division::DivisionRingAggregator;
pub use ring::RingAggregator;
pub use segtree::SegtreeAggregator;

use serde::Serialize;
use thiserror::Error;

use crate::automaton::SymbolId;
use crate::semiring::{Boolean, Count, Log, Real, Semiring, TropicalMax, TropicalMin};

/// More rollback was requested than the update history holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("cannot undo {requested} updates: only {available} recorded")]
pub struct UndoUnderflow {
    pub requested: usize,
    pub available: usize,
}

/// Operation counts since construction. Node-write fields are populated by
/// [`SegtreeAggregator`] only; the register-based variants have no per-key
/// cell traffic to meter.
#[derive(Debug, Clone, Default, Serialize)]
pub struct AggregatorStats {
    pub sets: u64,
    pub multiplies: u64,
    pub undone_updates: u64,
    /// Distinct tree nodes written by the most recent `set`.
    pub last_set_node_writes: u64,
    /// Largest distinct-node count any single `set` wrote.
    pub max_set_node_writes: u64,
    /// Total distinct-node writes across all `set`/`mult` updates.
    pub node_writes_total: u64,
    /// Node initializations spent growing the tree, kept separate from the
    /// per-`set` figures above.
    pub rebuild_node_writes: u64,
}

/// A rollback-capable symbol-to-value map with whole-map scaling.
///
/// `undo(n)` reverts the `n` most recent updates (each `set` or `mult` call
/// is one update), newest first, restoring every observable: `get` for all
/// keys, `value`, and `key_count`.
pub trait Aggregator<W: Semiring>: Sized {
    fn new() -> Self;

    /// Makes `get(key)` return exactly `value`, interning the key if new.
    fn set(&mut self, key: SymbolId, value: W);

    /// Current value for `key`; zero for keys never set.
    fn get(&self, key: SymbolId) -> W;

    /// Sum of the current values over all keys (zero when empty).
    fn value(&self) -> W;

    /// Multiplies every stored value by `m` on the left.
    fn mult(&mut self, m: W);

    /// Reverts the last `n` updates, newest first.
    fn undo(&mut self, n: usize) -> Result<(), UndoUnderflow>;

    /// A detached copy with the same observable contents, an empty update
    /// history, and zeroed stats.
    fn clone_snapshot(&self) -> Self;

    /// Number of interned keys.
    fn key_count(&self) -> usize;

    /// Interned keys, ascending.
    fn keys(&self) -> Vec<SymbolId>;

    fn stats(&self) -> &AggregatorStats;
}

/// The aggregator variant a semiring's capabilities admit: the ring variant
/// needs subtraction, the division variant needs inverses, and everything
/// else uses the segment tree.
pub trait DefaultAggregator: Semiring {
    type Agg: Aggregator<Self>;
}

impl DefaultAggregator for Boolean {
    type Agg = SegtreeAggregator<Boolean>;
}

impl DefaultAggregator for TropicalMin {
    type Agg = SegtreeAggregator<TropicalMin>;
}

impl DefaultAggregator for TropicalMax {
    type Agg = SegtreeAggregator<TropicalMax>;
}

impl DefaultAggregator for Log {
    type Agg = SegtreeAggregator<Log>;
}

impl DefaultAggregator for Real {
    type Agg = DivisionRingAggregator<Real>;
}

impl DefaultAggregator for Count {
    type Agg = RingAggregator<Count>;
}
