//! Sparsity measurements over the fallback structure.
//!
//! Two derived per-state symbol sets drive both the cost analyses and the
//! test oracles:
//!
//! * the *expanded* set: symbols a state can consume once fallback arcs are
//!   compiled away, i.e. its own out-symbols plus everything inherited along
//!   its fallback chain;
//! * the *demanded* set: symbols whose backward value the state may be asked
//!   for, i.e. the union of out-symbols over every state whose fallback chain
//!   passes through it (including itself).

use std::collections::BTreeSet;

use serde::Serialize;

use crate::automaton::forest::FailureForest;
use crate::automaton::{Automaton, StateId, SymbolId};
use crate::semiring::Semiring;
use crate::toposort::CycleError;

/// Per-state symbol sets after compiling fallbacks away: own out-symbols
/// united with the finished set of the fallback target.
pub fn expanded_symbol_sets<W: Semiring>(
    a: &Automaton<W>,
    forest: &FailureForest,
) -> Vec<BTreeSet<SymbolId>> {
    let n = a.n_states();
    let mut order: Vec<StateId> = (0..n).collect();
    order.sort_unstable_by_key(|&q| (forest.chain_len(q), q));
    let mut sets: Vec<BTreeSet<SymbolId>> = vec![BTreeSet::new(); n];
    for q in order {
        let mut set: BTreeSet<SymbolId> = a.out_symbols(q).collect();
        if let Some(p) = forest.parent(q) {
            set.extend(sets[p].iter().copied());
        }
        sets[q] = set;
    }
    sets
}

/// Per-state symbol sets a backward pass may demand: own out-symbols united
/// with the demands of every state falling back into this one.
pub fn demanded_symbol_sets<W: Semiring>(
    a: &Automaton<W>,
    forest: &FailureForest,
) -> Vec<BTreeSet<SymbolId>> {
    let n = a.n_states();
    let mut order: Vec<StateId> = (0..n).collect();
    order.sort_unstable_by_key(|&q| (std::cmp::Reverse(forest.chain_len(q)), q));
    let mut sets: Vec<BTreeSet<SymbolId>> = vec![BTreeSet::new(); n];
    for q in order {
        let mut set: BTreeSet<SymbolId> = a.out_symbols(q).collect();
        for &c in forest.children(q) {
            set.extend(sets[c].iter().copied());
        }
        sets[q] = set;
    }
    sets
}

/// Summary of how sparse an automaton is before and after fallback expansion.
#[derive(Debug, Clone, Serialize)]
pub struct SparsityStats {
    pub n_states: usize,
    pub n_symbols: usize,
    pub n_arcs: usize,
    pub n_fallbacks: usize,
    /// Sum over states of the out-symbol count.
    pub out_symbols: usize,
    /// Fraction of (state, symbol) pairs with at least one arc.
    pub s: f64,
    /// Sum over states of the expanded out-symbol count.
    pub expanded_out_symbols: usize,
    /// Fraction of (state, symbol) pairs consumable after expansion.
    pub s_bar: f64,
    /// Arc count of the materialized expansion, when one was computed.
    pub n_expanded_arcs: Option<usize>,
    /// Per-state demanded-set sizes, indexed by state id.
    pub demand_sizes: Vec<usize>,
    pub demand_total: usize,
}

impl SparsityStats {
    pub fn compute<W: Semiring>(a: &Automaton<W>) -> Result<Self, CycleError> {
        let forest = FailureForest::new(a)?;
        let n_states = a.n_states();
        let n_symbols = a.n_symbols();
        let cells = (n_states * n_symbols) as f64;
        let frac = |count: usize| {
            if n_states * n_symbols == 0 {
                0.0
            } else {
                count as f64 / cells
            }
        };

        let out_symbols = (0..n_states).map(|q| a.out_degree(q)).sum();
        let expanded = expanded_symbol_sets(a, &forest);
        let expanded_out_symbols = expanded.iter().map(BTreeSet::len).sum();
        let demand_sizes: Vec<usize> = demanded_symbol_sets(a, &forest)
            .iter()
            .map(BTreeSet::len)
            .collect();
        let demand_total = demand_sizes.iter().sum();
        Ok(Self {
            n_states,
            n_symbols,
            n_arcs: a.arc_count(),
            n_fallbacks: a.fallback_count(),
            out_symbols,
            s: frac(out_symbols),
            expanded_out_symbols,
            s_bar: frac(expanded_out_symbols),
            n_expanded_arcs: None,
            demand_sizes,
            demand_total,
        })
    }
}
