//! Aggregator for arbitrary semirings.
//!
//! Values sit in the leaves of a complete binary tree over a power-of-two
//! capacity; every node carries a summary `u` and a pending multiplier `m`.
//! The subtree below node `j` aggregates to `m[j] * u[j]`, with `u[j]`
//! combining the children's aggregates, so:
//!
//! * `value` reads the root,
//! * `mult` folds into the root's pending multiplier (one node write),
//! * `get` multiplies the pending factors along one root-to-leaf path,
//! * `set` pushes pending factors down its path (writing each path node and
//!   its sibling at most once), rewrites the leaf, and recombines upward.
//!
//! Without division there is no way to splice a new leaf value under an
//! outstanding multiplier, which is exactly why the pushes exist.
//!
//! Every cell write is journaled, so `undo` restores state exactly; capacity
//! growth journals the whole pre-growth array, which doubling keeps amortized
//! constant per insert.

use std::collections::HashMap;

use crate::aggregator::{Aggregator, AggregatorStats, UndoUnderflow};
use crate::automaton::SymbolId;
use crate::semiring::Semiring;

#[derive(Debug, Clone, Copy)]
struct Node<W> {
    /// Pending multiplier for the whole subtree.
    m: W,
    /// Aggregate of the subtree with `m` not yet applied.
    u: W,
}

#[derive(Debug, Clone)]
enum Entry<W> {
    NodeM {
        idx: usize,
        old: W,
    },
    NodeU {
        idx: usize,
        old: W,
    },
    Intern {
        key: SymbolId,
    },
    Rebuild {
        old_cap: usize,
        old_nodes: Vec<Node<W>>,
    },
}

/// Segment-tree aggregator; see the module docs.
#[derive(Debug)]
pub struct SegtreeAggregator<W> {
    /// Leaf capacity; zero until the first key arrives, then a power of two.
    cap: usize,
    /// 1-indexed node array of length `2 * cap`; leaf for slot `i` is
    /// `cap + i`.
    nodes: Vec<Node<W>>,
    keys: Vec<SymbolId>,
    slots: HashMap<SymbolId, usize>,
    journal: Vec<Entry<W>>,
    /// Journal entries per recorded update, oldest first.
    update_sizes: Vec<usize>,
    stats: AggregatorStats,
}

impl<W: Semiring> SegtreeAggregator<W> {
    fn log_m(&mut self, idx: usize, touched: &mut Vec<usize>) {
        self.journal.push(Entry::NodeM {
            idx,
            old: self.nodes[idx].m,
        });
        touched.push(idx);
    }

    fn log_u(&mut self, idx: usize, touched: &mut Vec<usize>) {
        self.journal.push(Entry::NodeU {
            idx,
            old: self.nodes[idx].u,
        });
        touched.push(idx);
    }

    /// Next node after `j` on the path from the root to `target`.
    fn step(j: usize, target: usize) -> usize {
        target >> (target.ilog2() - j.ilog2() - 1)
    }

    /// True value of each leaf slot, with all pending multipliers applied.
    fn flattened_leaves(&self) -> Vec<W> {
        let mut out = vec![W::zero(); self.cap];
        if self.cap == 0 {
            return out;
        }
        let mut stack = vec![(1usize, W::one())];
        while let Some((j, acc)) = stack.pop() {
            let acc = acc.mul(self.nodes[j].m);
            if j >= self.cap {
                out[j - self.cap] = acc.mul(self.nodes[j].u);
            } else {
                stack.push((2 * j, acc));
                stack.push((2 * j + 1, acc));
            }
        }
        out
    }

    /// Builds a fresh node array of capacity `cap` holding `leaves`, with no
    /// pending multipliers anywhere.
    fn build_nodes(cap: usize, leaves: &[W]) -> Vec<Node<W>> {
        let mut nodes = vec![
            Node {
                m: W::one(),
                u: W::zero(),
            };
            2 * cap.max(1)
        ];
        if cap == 0 {
            nodes.clear();
            return nodes;
        }
        for (i, &v) in leaves.iter().enumerate() {
            nodes[cap + i].u = v;
        }
        for j in (1..cap).rev() {
            nodes[j].u = nodes[2 * j].u.add(nodes[2 * j + 1].u);
        }
        nodes
    }

    /// Doubles capacity, journaling the entire pre-growth array.
    fn grow(&mut self) {
        let leaves = self.flattened_leaves();
        let old_cap = self.cap;
        let old_nodes = std::mem::take(&mut self.nodes);
        self.cap = if old_cap == 0 { 1 } else { old_cap * 2 };
        self.nodes = Self::build_nodes(self.cap, &leaves);
        self.stats.rebuild_node_writes += self.nodes.len() as u64;
        self.journal.push(Entry::Rebuild { old_cap, old_nodes });
    }

    fn set_path(&mut self, j: usize, target: usize, value: W, touched: &mut Vec<usize>) {
        if j == target {
            if self.nodes[j].m != W::one() {
                self.log_m(j, touched);
                self.nodes[j].m = W::one();
            }
            self.log_u(j, touched);
            self.nodes[j].u = value;
            return;
        }
        let pending = self.nodes[j].m;
        if pending != W::one() {
            for c in [2 * j, 2 * j + 1] {
                self.log_m(c, touched);
                self.nodes[c].m = pending.mul(self.nodes[c].m);
            }
            self.log_u(j, touched);
            self.nodes[j].u = pending.mul(self.nodes[j].u);
            self.log_m(j, touched);
            self.nodes[j].m = W::one();
        }
        self.set_path(Self::step(j, target), target, value, touched);
        self.log_u(j, touched);
        let (l, r) = (&self.nodes[2 * j], &self.nodes[2 * j + 1]);
        self.nodes[j].u = l.m.mul(l.u).add(r.m.mul(r.u));
    }
}

impl<W: Semiring> Aggregator<W> for SegtreeAggregator<W> {
    fn new() -> Self {
        Self {
            cap: 0,
            nodes: Vec::new(),
            keys: Vec::new(),
            slots: HashMap::new(),
            journal: Vec::new(),
            update_sizes: Vec::new(),
            stats: AggregatorStats::default(),
        }
    }

    fn set(&mut self, key: SymbolId, value: W) {
        let mark = self.journal.len();
        let mut touched = Vec::new();
        let slot = match self.slots.get(&key) {
            Some(&s) => s,
            None => {
                if self.keys.len() == self.cap {
                    self.grow();
                }
                let s = self.keys.len();
                self.keys.push(key);
                self.slots.insert(key, s);
                self.journal.push(Entry::Intern { key });
                s
            }
        };
        self.set_path(1, self.cap + slot, value, &mut touched);
        self.update_sizes.push(self.journal.len() - mark);

        touched.sort_unstable();
        touched.dedup();
        let writes = touched.len() as u64;
        self.stats.sets += 1;
        self.stats.last_set_node_writes = writes;
        self.stats.max_set_node_writes = self.stats.max_set_node_writes.max(writes);
        self.stats.node_writes_total += writes;
    }

    fn get(&self, key: SymbolId) -> W {
        let Some(&slot) = self.slots.get(&key) else {
            return W::zero();
        };
        let target = self.cap + slot;
        let mut acc = W::one();
        let mut j = 1;
        while j != target {
            acc = acc.mul(self.nodes[j].m);
            j = Self::step(j, target);
        }
        acc.mul(self.nodes[j].m).mul(self.nodes[j].u)
    }

    fn value(&self) -> W {
        if self.cap == 0 {
            W::zero()
        } else {
            self.nodes[1].m.mul(self.nodes[1].u)
        }
    }

    fn mult(&mut self, m: W) {
        let mark = self.journal.len();
        if self.cap > 0 {
            self.journal.push(Entry::NodeM {
                idx: 1,
                old: self.nodes[1].m,
            });
            self.nodes[1].m = m.mul(self.nodes[1].m);
            self.stats.node_writes_total += 1;
        }
        self.update_sizes.push(self.journal.len() - mark);
        self.stats.multiplies += 1;
    }

    fn undo(&mut self, n: usize) -> Result<(), UndoUnderflow> {
        if n > self.update_sizes.len() {
            return Err(UndoUnderflow {
                requested: n,
                available: self.update_sizes.len(),
            });
        }
        for _ in 0..n {
            let size = self.update_sizes.pop().expect("checked above");
            for _ in 0..size {
                match self.journal.pop().expect("journal matches update sizes") {
                    Entry::NodeM { idx, old } => self.nodes[idx].m = old,
                    Entry::NodeU { idx, old } => self.nodes[idx].u = old,
                    Entry::Intern { key } => {
                        self.slots.remove(&key);
                        self.keys.pop();
                    }
                    Entry::Rebuild { old_cap, old_nodes } => {
                        self.cap = old_cap;
                        self.nodes = old_nodes;
                    }
                }
            }
        }
        self.stats.undone_updates += n as u64;
        Ok(())
    }

    fn clone_snapshot(&self) -> Self {
        let leaves = self.flattened_leaves();
        Self {
            cap: self.cap,
            nodes: Self::build_nodes(self.cap, &leaves),
            keys: self.keys.clone(),
            slots: self.slots.clone(),
            journal: Vec::new(),
            update_sizes: Vec::new(),
            stats: AggregatorStats::default(),
        }
    }

    fn key_count(&self) -> usize {
        self.keys.len()
    }

    fn keys(&self) -> Vec<SymbolId> {
        let mut ks = self.keys.clone();
        ks.sort_unstable();
        ks
    }

    fn stats(&self) -> &AggregatorStats {
        &self.stats
    }
}
