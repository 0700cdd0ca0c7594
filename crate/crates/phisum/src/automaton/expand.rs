//! Compiling fallback arcs away.
//!
//! A state that cannot consume a symbol delegates to its fallback target, so
//! the automaton behaves as if the target's arcs for the missing symbols were
//! its own (scaled by the fallback weight in weighted mode). Expansion makes
//! those implicit arcs explicit: states are processed fallback targets first,
//! each inheriting the finished symbol groups of its target for symbols it
//! lacks, so multi-level inheritance (and multi-level weight scaling)
//! composes automatically. The result has no fallback arcs and the same
//! pathsum.

use std::collections::BTreeMap;

use crate::automaton::forest::FailureForest;
use crate::automaton::{Automaton, StateId, SymbolId};
use crate::semiring::Semiring;
use crate::toposort::CycleError;

/// The expanded automaton and the number of arcs added.
pub fn expand<W: Semiring>(a: &Automaton<W>) -> Result<(Automaton<W>, usize), CycleError> {
    let forest = FailureForest::new(a)?;
    let n = a.n_states();
    let mut order: Vec<StateId> = (0..n).collect();
    order.sort_unstable_by_key(|&q| (forest.chain_len(q), q));

    let mut out: Vec<BTreeMap<SymbolId, Vec<(StateId, W)>>> = (0..n)
        .map(|q| {
            a.symbol_groups(q)
                .map(|(sym, dsts)| (sym, dsts.to_vec()))
                .collect()
        })
        .collect();

    let mut added = 0usize;
    for q in order {
        let Some(fb) = a.fallback_of(q) else {
            continue;
        };
        let inherited: Vec<(SymbolId, Vec<(StateId, W)>)> = out[fb.dst]
            .iter()
            .filter(|(sym, _)| !a.has_symbol(q, **sym))
            .map(|(&sym, dsts)| {
                let group = if a.weighted_fallbacks() {
                    dsts.iter().map(|&(d, w)| (d, fb.weight.mul(w))).collect()
                } else {
                    dsts.clone()
                };
                (sym, group)
            })
            .collect();
        for (sym, group) in inherited {
            added += group.len();
            out[q].insert(sym, group);
        }
    }

    Ok((a.with_expanded_arcs(out), added))
}

impl<W: Semiring> Automaton<W> {
    /// Same states, weights, and alphabet, with `out` as the arc structure
    /// and no fallback arcs.
    fn with_expanded_arcs(&self, out: Vec<BTreeMap<SymbolId, Vec<(StateId, W)>>>) -> Self {
        Automaton {
            states: self.states.clone(),
            symbols: self.symbols.clone(),
            out,
            fallback: vec![None; self.n_states()],
            initial: (0..self.n_states())
                .map(|q| self.initial_weight(q))
                .collect(),
            finals: (0..self.n_states()).map(|q| self.final_weight(q)).collect(),
            weighted_fallbacks: false,
            merged_parallel_arcs: self.merged_parallel_arcs(),
        }
    }
}
