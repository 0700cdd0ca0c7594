//! Weighted finite-state automata with failure (fallback) transitions.
//!
//! An [`Automaton`] stores, per state, the outgoing arcs grouped by symbol,
//! at most one fallback arc, and initial/final weights. States and symbols
//! are interned strings addressed by dense ids.
//!
//! Structural rules enforced by the [`AutomatonBuilder`]:
//!
//! * parallel arcs (same source, symbol, and destination) are merged by
//!   semiring addition, and the number of merges is recorded;
//! * arcs and fallback arcs whose weight is exactly zero are dropped, since a
//!   zero-weight transition is indistinguishable from an absent one;
//! * a state may have at most one fallback arc;
//! * the symbol name `phi` is reserved for fallback arcs and rejected as an
//!   ordinary arc label.
//!
//! Acyclicity of the combined arc/fallback graph is checked by
//! [`Automaton::validate`], not at build time.

pub mod expand;
pub mod forest;
pub mod format;
pub mod stats;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::semiring::Semiring;

pub type StateId = usize;
pub type SymbolId = usize;

/// Symbol name reserved for fallback arcs in the text format.
pub const FALLBACK_TOKEN: &str = "phi";

/// Structural rule violated while assembling an automaton.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("state {state:?} already has a fallback arc")]
    DuplicateFailureArc { state: String },
    #[error("symbol name {FALLBACK_TOKEN:?} is reserved for fallback arcs")]
    ReservedSymbol,
}

/// Interned name pool mapping strings to dense ids in first-use order.
#[derive(Debug, Clone, Default)]
pub struct NameTable {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl NameTable {
    pub fn intern(&mut self, name: &str) -> usize {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: usize) -> &str {
        &self.names[id]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// One ordinary transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc<W> {
    pub src: StateId,
    pub sym: SymbolId,
    pub dst: StateId,
    pub weight: W,
}

/// A state's fallback arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fallback<W> {
    pub dst: StateId,
    pub weight: W,
}

/// An acyclic weighted automaton with fallback arcs.
#[derive(Debug, Clone)]
pub struct Automaton<W> {
    states: NameTable,
    symbols: NameTable,
    /// Per state: outgoing arcs grouped by symbol, destinations sorted.
    out: Vec<BTreeMap<SymbolId, Vec<(StateId, W)>>>,
    fallback: Vec<Option<Fallback<W>>>,
    initial: Vec<W>,
    finals: Vec<W>,
    weighted_fallbacks: bool,
    merged_parallel_arcs: usize,
}

impl<W: Semiring> Automaton<W> {
    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_symbols(&self) -> usize {
        self.symbols.len()
    }

    pub fn state_name(&self, q: StateId) -> &str {
        self.states.name(q)
    }

    pub fn symbol_name(&self, a: SymbolId) -> &str {
        self.symbols.name(a)
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.lookup(name)
    }

    pub fn symbol_id(&self, name: &str) -> Option<SymbolId> {
        self.symbols.lookup(name)
    }

    pub fn initial_weight(&self, q: StateId) -> W {
        self.initial[q]
    }

    pub fn final_weight(&self, q: StateId) -> W {
        self.finals[q]
    }

    pub fn fallback_of(&self, q: StateId) -> Option<Fallback<W>> {
        self.fallback[q]
    }

    /// True when any fallback arc was given an explicit weight. In unweighted
    /// mode every fallback weight is `one`.
    pub fn weighted_fallbacks(&self) -> bool {
        self.weighted_fallbacks
    }

    /// Number of parallel arcs merged away at build time.
    pub fn merged_parallel_arcs(&self) -> usize {
        self.merged_parallel_arcs
    }

    /// Outgoing symbols of `q`, ascending.
    pub fn out_symbols(&self, q: StateId) -> impl Iterator<Item = SymbolId> + '_ {
        self.out[q].keys().copied()
    }

    pub fn out_degree(&self, q: StateId) -> usize {
        self.out[q].len()
    }

    pub fn has_symbol(&self, q: StateId, a: SymbolId) -> bool {
        self.out[q].contains_key(&a)
    }

    /// Destinations and weights of arcs leaving `q` on `a`.
    pub fn arcs_for(&self, q: StateId, a: SymbolId) -> &[(StateId, W)] {
        self.out[q].get(&a).map_or(&[], Vec::as_slice)
    }

    pub fn symbol_groups(&self, q: StateId) -> impl Iterator<Item = (SymbolId, &[(StateId, W)])> {
        self.out[q].iter().map(|(&a, v)| (a, v.as_slice()))
    }

    /// All arcs in (source, symbol, destination) order.
    pub fn arcs(&self) -> impl Iterator<Item = Arc<W>> + '_ {
        (0..self.n_states()).flat_map(move |q| {
            self.out[q].iter().flat_map(move |(&sym, dsts)| {
                dsts.iter().map(move |&(dst, weight)| Arc {
                    src: q,
                    sym,
                    dst,
                    weight,
                })
            })
        })
    }

    pub fn arc_count(&self) -> usize {
        self.out
            .iter()
            .map(|m| m.values().map(Vec::len).sum::<usize>())
            .sum()
    }

    pub fn fallback_count(&self) -> usize {
        self.fallback.iter().filter(|f| f.is_some()).count()
    }

    /// Checks that the combined arc/fallback graph is acyclic.
    pub fn validate(&self) -> Result<(), crate::toposort::CycleError> {
        crate::toposort::reverse_topological(self).map(|_| ())
    }
}

/// Incremental construction of an [`Automaton`] from named states and symbols.
#[derive(Debug, Clone)]
pub struct AutomatonBuilder<W> {
    states: NameTable,
    symbols: NameTable,
    arcs: Vec<Arc<W>>,
    fallback: Vec<Option<Fallback<W>>>,
    initial: Vec<W>,
    finals: Vec<W>,
    weighted_fallbacks: bool,
}

impl<W: Semiring> Default for AutomatonBuilder<W> {
    fn default() -> Self {
        Self::new()
    }
}

impl<W: Semiring> AutomatonBuilder<W> {
    pub fn new() -> Self {
        Self {
            states: NameTable::default(),
            symbols: NameTable::default(),
            arcs: Vec::new(),
            fallback: Vec::new(),
            initial: Vec::new(),
            finals: Vec::new(),
            weighted_fallbacks: false,
        }
    }

    /// Interns a state name, creating the state on first use.
    pub fn state(&mut self, name: &str) -> StateId {
        let id = self.states.intern(name);
        while self.fallback.len() <= id {
            self.fallback.push(None);
            self.initial.push(W::zero());
            self.finals.push(W::zero());
        }
        id
    }

    pub fn add_arc(
        &mut self,
        src: &str,
        dst: &str,
        sym: &str,
        weight: W,
    ) -> Result<(), BuildError> {
        if sym == FALLBACK_TOKEN {
            return Err(BuildError::ReservedSymbol);
        }
        let src = self.state(src);
        let dst = self.state(dst);
        let sym = self.symbols.intern(sym);
        self.arcs.push(Arc {
            src,
            sym,
            dst,
            weight,
        });
        Ok(())
    }

    /// Declares a symbol without attaching an arc, so the alphabet can be
    /// larger than the set of labels in use.
    pub fn add_symbol(&mut self, sym: &str) -> Result<SymbolId, BuildError> {
        if sym == FALLBACK_TOKEN {
            return Err(BuildError::ReservedSymbol);
        }
        Ok(self.symbols.intern(sym))
    }

    pub fn set_fallback(
        &mut self,
        src: &str,
        dst: &str,
        weight: Option<W>,
    ) -> Result<(), BuildError> {
        let src_id = self.state(src);
        let dst_id = self.state(dst);
        if self.fallback[src_id].is_some() {
            return Err(BuildError::DuplicateFailureArc {
                state: src.to_string(),
            });
        }
        if weight.is_some() {
            self.weighted_fallbacks = true;
        }
        self.fallback[src_id] = Some(Fallback {
            dst: dst_id,
            weight: weight.unwrap_or_else(W::one),
        });
        Ok(())
    }

    /// Adds to the initial weight of `state` (repeated calls merge by `add`).
    pub fn add_initial(&mut self, state: &str, weight: W) {
        let q = self.state(state);
        self.initial[q] = self.initial[q].add(weight);
    }

    /// Adds to the final weight of `state` (repeated calls merge by `add`).
    pub fn add_final(&mut self, state: &str, weight: W) {
        let q = self.state(state);
        self.finals[q] = self.finals[q].add(weight);
    }

    pub fn build(self) -> Automaton<W> {
        let n = self.states.len();
        let mut out: Vec<BTreeMap<SymbolId, Vec<(StateId, W)>>> = vec![BTreeMap::new(); n];
        let mut merged = 0usize;
        for arc in self.arcs {
            if arc.weight.is_zero() {
                continue;
            }
            let dsts = out[arc.src].entry(arc.sym).or_default();
            match dsts.binary_search_by_key(&arc.dst, |&(d, _)| d) {
                Ok(i) => {
                    dsts[i].1 = dsts[i].1.add(arc.weight);
                    merged += 1;
                }
                Err(i) => dsts.insert(i, (arc.dst, arc.weight)),
            }
        }
        let fallback = self
            .fallback
            .into_iter()
            .map(|f| f.filter(|fb| !fb.weight.is_zero()))
            .collect();
        Automaton {
            states: self.states,
            symbols: self.symbols,
            out,
            fallback,
            initial: self.initial,
            finals: self.finals,
            weighted_fallbacks: self.weighted_fallbacks,
            merged_parallel_arcs: merged,
        }
    }
}
