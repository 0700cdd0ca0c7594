//! Aggregator for ring weights.
//!
//! Subtraction lets `set` maintain the running total directly: add the new
//! value, subtract what the key previously contributed. Multipliers are not
//! pushed into entries at all; each entry remembers the epoch (multiplier
//! count) at which it was written, and `get` multiplies in the product of
//! everything applied since, read from an append-only product tree in
//! logarithmic time. `mult` itself is constant amortized work: scale the
//! total, append the factor.
//!
//! Rolling back a `mult` just truncates the product sequence; rolling back a
//! `set` restores the entry and the total. Cells beyond the logical end of
//! the product tree are never combined into an in-range query, so truncation
//! needs no journaling.

use std::collections::HashMap;

use crate::aggregator::{Aggregator, AggregatorStats, UndoUnderflow};
use crate::automaton::SymbolId;
use crate::semiring::{Ring, Semiring};

/// Append-only sequence of multipliers with high-to-low suffix products.
#[derive(Debug, Clone)]
struct SuffixProducts<W> {
    tree: Vec<W>,
    cap: usize,
    len: usize,
}

impl<W: Semiring> SuffixProducts<W> {
    fn new() -> Self {
        Self {
            tree: Vec::new(),
            cap: 0,
            len: 0,
        }
    }

    fn push(&mut self, m: W) {
        if self.len == self.cap {
            let new_cap = if self.cap == 0 { 1 } else { self.cap * 2 };
            let mut tree = vec![W::one(); 2 * new_cap];
            for i in 0..self.len {
                tree[new_cap + i] = self.tree[self.cap + i];
            }
            for j in (1..new_cap).rev() {
                tree[j] = tree[2 * j + 1].mul(tree[2 * j]);
            }
            self.tree = tree;
            self.cap = new_cap;
        }
        let mut j = self.cap + self.len;
        self.tree[j] = m;
        while j > 1 {
            j /= 2;
            self.tree[j] = self.tree[2 * j + 1].mul(self.tree[2 * j]);
        }
        self.len += 1;
    }

    /// Forgets the most recent multiplier. Stale cells are left in place;
    /// they are outside every future in-range query.
    fn pop(&mut self) {
        self.len -= 1;
    }

    fn multiplier(&self, position: usize) -> W {
        self.tree[self.cap + position]
    }

    /// Product of the multipliers at `from..len`, most recent leftmost.
    fn suffix(&self, from: usize) -> W {
        let (mut lo, mut hi) = (W::one(), W::one());
        let (mut l, mut r) = (self.cap + from, self.cap + self.len);
        while l < r {
            if l & 1 == 1 {
                lo = self.tree[l].mul(lo);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                hi = hi.mul(self.tree[r]);
            }
            l /= 2;
            r /= 2;
        }
        hi.mul(lo)
    }
}

#[derive(Debug, Clone)]
enum Update<W> {
    Set {
        key: SymbolId,
        old_entry: Option<(W, usize)>,
        old_total: W,
    },
    Mult {
        old_total: W,
    },
}

/// Ring aggregator; see the module docs.
#[derive(Debug)]
pub struct RingAggregator<W: Ring> {
    /// Value as written, plus the epoch it was written at.
    entries: HashMap<SymbolId, (W, usize)>,
    total: W,
    epochs: usize,
    products: SuffixProducts<W>,
    journal: Vec<Update<W>>,
    stats: AggregatorStats,
}

impl<W: Ring> Aggregator<W> for RingAggregator<W> {
    fn new() -> Self {
        Self {
            entries: HashMap::new(),
            total: W::zero(),
            epochs: 0,
            products: SuffixProducts::new(),
            journal: Vec::new(),
            stats: AggregatorStats::default(),
        }
    }

    fn set(&mut self, key: SymbolId, value: W) {
        let old_entry = self.entries.get(&key).copied();
        let old_total = self.total;
        let previous = match old_entry {
            Some((v, epoch)) => self.products.suffix(epoch).mul(v),
            None => W::zero(),
        };
        self.total = self.total.add(value.sub(previous));
        self.entries.insert(key, (value, self.epochs));
        self.journal.push(Update::Set {
            key,
            old_entry,
            old_total,
        });
        self.stats.sets += 1;
    }

    fn get(&self, key: SymbolId) -> W {
        match self.entries.get(&key) {
            Some(&(v, epoch)) => self.products.suffix(epoch).mul(v),
            None => W::zero(),
        }
    }

    fn value(&self) -> W {
        self.total
    }

    fn mult(&mut self, m: W) {
        self.journal.push(Update::Mult {
            old_total: self.total,
        });
        self.total = m.mul(self.total);
        self.products.push(m);
        self.epochs += 1;
        self.stats.multiplies += 1;
    }

    fn undo(&mut self, n: usize) -> Result<(), UndoUnderflow> {
        if n > self.journal.len() {
            return Err(UndoUnderflow {
                requested: n,
                available: self.journal.len(),
            });
        }
        for _ in 0..n {
            match self.journal.pop().expect("checked above") {
                Update::Set {
                    key,
                    old_entry,
                    old_total,
                } => {
                    match old_entry {
                        Some(e) => {
                            self.entries.insert(key, e);
                        }
                        None => {
                            self.entries.remove(&key);
                        }
                    }
                    self.total = old_total;
                }
                Update::Mult { old_total } => {
                    self.products.pop();
                    self.epochs -= 1;
                    self.total = old_total;
                }
            }
        }
        self.stats.undone_updates += n as u64;
        Ok(())
    }

    fn clone_snapshot(&self) -> Self {
        let mut suffixes = vec![W::one(); self.epochs + 1];
        for e in (0..self.epochs).rev() {
            suffixes[e] = suffixes[e + 1].mul(self.products.multiplier(e));
        }
        let entries = self
            .entries
            .iter()
            .map(|(&k, &(v, epoch))| (k, (suffixes[epoch].mul(v), 0)))
            .collect();
        Self {
            entries,
            total: self.total,
            epochs: 0,
            products: SuffixProducts::new(),
            journal: Vec::new(),
            stats: AggregatorStats::default(),
        }
    }

    fn key_count(&self) -> usize {
        self.entries.len()
    }

    fn keys(&self) -> Vec<SymbolId> {
        let mut ks: Vec<SymbolId> = self.entries.keys().copied().collect();
        ks.sort_unstable();
        ks
    }

    fn stats(&self) -> &AggregatorStats {
        &self.stats
    }
}
