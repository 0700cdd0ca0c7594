//! Aggregator for division-ring weights.
//!
//! With inverses available, one running scale factor covers every entry:
//! entries store values divided by the scale at write time, `get` multiplies
//! the scale back in, and `mult` only touches the scale and its cached
//! inverse. Every update is constant time.
//!
//! When a zero multiplier arrives the scale collapses to zero and has no
//! inverse; entries written while the scale is zero store a zero placeholder
//! (their true value is unrecoverable by scaling, and anything multiplied by
//! the zero scale reads back as zero anyway). Pathsum runs never feed a zero
//! multiplier because zero-weight fallback arcs are dropped at build time.

use std::collections::HashMap;

use crate::aggregator::{Aggregator, AggregatorStats, UndoUnderflow};
use crate::automaton::SymbolId;
use crate::semiring::DivisionRing;

#[derive(Debug, Clone)]
enum Update<W> {
    Set {
        key: SymbolId,
        old_entry: Option<W>,
        old_total: W,
    },
    Mult {
        old_scale: W,
        old_scale_inv: W,
    },
}

/// Division-ring aggregator; see the module docs.
#[derive(Debug)]
pub struct DivisionRingAggregator<W: DivisionRing> {
    /// Stored values are divided by the scale in force when written.
    entries: HashMap<SymbolId, W>,
    scale: W,
    scale_inv: W,
    /// Sum of stored (unscaled) values.
    total: W,
    journal: Vec<Update<W>>,
    stats: AggregatorStats,
}

impl<W: DivisionRing> Aggregator<W> for DivisionRingAggregator<W> {
    fn new() -> Self {
        Self {
            entries: HashMap::new(),
            scale: W::one(),
            scale_inv: W::one(),
            total: W::zero(),
            journal: Vec::new(),
            stats: AggregatorStats::default(),
        }
    }

    fn set(&mut self, key: SymbolId, value: W) {
        let stored = if self.scale.is_zero() {
            W::zero()
        } else {
            self.scale_inv.mul(value)
        };
        let old_entry = self.entries.insert(key, stored);
        let old_total = self.total;
        self.total = self
            .total
            .add(stored.sub(old_entry.unwrap_or_else(W::zero)));
        self.journal.push(Update::Set {
            key,
            old_entry,
            old_total,
        });
        self.stats.sets += 1;
    }

    fn get(&self, key: SymbolId) -> W {
        match self.entries.get(&key) {
            Some(&stored) => self.scale.mul(stored),
            None => W::zero(),
        }
    }

    fn value(&self) -> W {
        self.scale.mul(self.total)
    }

    fn mult(&mut self, m: W) {
        self.journal.push(Update::Mult {
            old_scale: self.scale,
            old_scale_inv: self.scale_inv,
        });
        self.scale = m.mul(self.scale);
        if !m.is_zero() {
            self.scale_inv = self.scale_inv.mul(m.inv());
        }
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
                Update::Mult {
                    old_scale,
                    old_scale_inv,
                } => {
                    self.scale = old_scale;
                    self.scale_inv = old_scale_inv;
                }
            }
        }
        self.stats.undone_updates += n as u64;
        Ok(())
    }

    fn clone_snapshot(&self) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(&k, &stored)| (k, self.scale.mul(stored)))
            .collect();
        Self {
            entries,
            scale: W::one(),
            scale_inv: W::one(),
            total: self.scale.mul(self.total),
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
