//! Reverse topological orders over the combined arc/fallback graph.
//!
//! Backward-value algorithms process a state only after every state it can
//! reach by one arc or fallback arc, so they consume a reverse topological
//! order of the union graph. Two builders are provided:
//!
//! * [`OrderKind::Kahn`]: plain Kahn's algorithm, smallest-id-first among
//!   ready states;
//! * [`OrderKind::Greedy`]: prefers ready states that attach directly to the
//!   simulated aggregator frontier of their failure tree, so that a single
//!   aggregator sweep per tree suffices whenever the graph permits one.
//!
//! [`is_compatible`] checks the property the greedy builder aims for: an
//! order is compatible with the failure forest when replaying it never asks
//! an aggregator to climb back through symbols it has already retracted, so
//! each state is entered exactly once.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automaton::forest::FailureForest;
use crate::automaton::{Automaton, StateId};
use crate::semiring::Semiring;

/// The combined arc/fallback graph contains a cycle, listed by state name in
/// edge direction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("arc/fallback graph is cyclic: {}", cycle_display(.cycle))]
pub struct CycleError {
    pub cycle: Vec<String>,
}

fn cycle_display(cycle: &[String]) -> String {
    let mut s = cycle.join(" -> ");
    if let Some(first) = cycle.first() {
        s.push_str(" -> ");
        s.push_str(first);
    }
    s
}

/// Strategy for building a state order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderKind {
    Kahn,
    Greedy,
}

impl OrderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OrderKind::Kahn => "kahn",
            OrderKind::Greedy => "greedy",
        }
    }
}

impl std::fmt::Display for OrderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for OrderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kahn" => Ok(OrderKind::Kahn),
            "greedy" => Ok(OrderKind::Greedy),
            _ => Err(format!("unknown order {s:?} (expected kahn or greedy)")),
        }
    }
}

/// A reverse topological order plus its compatibility with the failure forest.
#[derive(Debug, Clone)]
pub struct StateOrder {
    pub kind: OrderKind,
    pub order: Vec<StateId>,
    pub compatible: bool,
}

struct UnionGraph {
    /// Remaining out-edges (arcs plus fallback) per state.
    out_count: Vec<usize>,
    /// For each state, the sources of edges pointing at it, with multiplicity.
    rev: Vec<Vec<StateId>>,
}

impl UnionGraph {
    fn new<W: Semiring>(a: &Automaton<W>) -> Self {
        let n = a.n_states();
        let mut out_count = vec![0usize; n];
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for arc in a.arcs() {
            out_count[arc.src] += 1;
            rev[arc.dst].push(arc.src);
        }
        for (q, out) in out_count.iter_mut().enumerate() {
            if let Some(fb) = a.fallback_of(q) {
                *out += 1;
                rev[fb.dst].push(q);
            }
        }
        Self { out_count, rev }
    }
}

/// Smallest-id-first reverse topological order of the arc/fallback graph.
pub fn reverse_topological<W: Semiring>(a: &Automaton<W>) -> Result<Vec<StateId>, CycleError> {
    let n = a.n_states();
    let mut g = UnionGraph::new(a);
    let mut ready: BTreeSet<StateId> = (0..n).filter(|&q| g.out_count[q] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&q) = ready.iter().next() {
        ready.remove(&q);
        order.push(q);
        for i in 0..g.rev[q].len() {
            let src = g.rev[q][i];
            g.out_count[src] -= 1;
            if g.out_count[src] == 0 {
                ready.insert(src);
            }
        }
    }
    if order.len() < n {
        return Err(extract_cycle(a, &order));
    }
    Ok(order)
}

/// Reverse topological order that pops, among ready states, one whose failure
/// tree frontier can absorb it without re-ascending; ties break to the
/// smallest id, and when no ready state is cheap the smallest id overall is
/// taken.
pub fn greedy_reverse_topological<W: Semiring>(
    a: &Automaton<W>,
    forest: &FailureForest,
) -> Result<Vec<StateId>, CycleError> {
    let n = a.n_states();
    let mut g = UnionGraph::new(a);

    // Simulated sweep state per failure tree, indexed by tree root.
    let mut frontier: Vec<Option<StateId>> = vec![None; n];
    let mut children_left: Vec<usize> = (0..n).map(|q| forest.children(q).len()).collect();

    let is_cheap = |q: StateId, frontier: &[Option<StateId>]| -> bool {
        let root = forest.root_of(q);
        match forest.parent(q) {
            None => frontier[root].is_none(),
            Some(p) => frontier[root] == Some(p),
        }
    };

    let mut ready: BTreeSet<StateId> = BTreeSet::new();
    let mut cheap: BTreeSet<StateId> = BTreeSet::new();
    for q in 0..n {
        if g.out_count[q] == 0 {
            ready.insert(q);
            if is_cheap(q, &frontier) {
                cheap.insert(q);
            }
        }
    }

    let mut order = Vec::with_capacity(n);
    while let Some(&q) = cheap.iter().next().or_else(|| ready.iter().next()) {
        ready.remove(&q);
        cheap.remove(&q);
        order.push(q);

        let root = forest.root_of(q);
        if let Some(p) = forest.parent(q) {
            children_left[p] -= 1;
        }
        frontier[root] = Some(q);
        // Retract the frontier past states no future pop will attach to.
        while let Some(f) = frontier[root] {
            if children_left[f] > 0 {
                break;
            }
            match forest.parent(f) {
                Some(p) => frontier[root] = Some(p),
                None => break,
            }
        }

        for i in 0..g.rev[q].len() {
            let src = g.rev[q][i];
            g.out_count[src] -= 1;
            if g.out_count[src] == 0 {
                ready.insert(src);
                if is_cheap(src, &frontier) {
                    cheap.insert(src);
                }
            }
        }
        // The frontier of this tree moved, so recheck its ready states.
        for &r in &ready {
            if forest.root_of(r) == root {
                if is_cheap(r, &frontier) {
                    cheap.insert(r);
                } else {
                    cheap.remove(&r);
                }
            }
        }
    }
    if order.len() < n {
        return Err(extract_cycle(a, &order));
    }
    Ok(order)
}

/// True when replaying `order` keeps each failure tree's states on a single
/// root-to-frontier stack: every state lands either on top of its fallback
/// target or after only retractions, never after a retraction is reversed.
pub fn is_compatible(order: &[StateId], forest: &FailureForest) -> bool {
    let n = forest.n_states();
    let mut stack_of: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for &s in order {
        let root = forest.root_of(s);
        let stack = &mut stack_of[root];
        match forest.parent(s) {
            None => {
                if !stack.is_empty() {
                    return false;
                }
                stack.push(s);
            }
            Some(target) => {
                while let Some(&top) = stack.last() {
                    if top == target {
                        break;
                    }
                    stack.pop();
                }
                if stack.last() != Some(&target) {
                    return false;
                }
                stack.push(s);
            }
        }
    }
    true
}

/// Builds the requested order and records its forest compatibility.
pub fn build_order<W: Semiring>(
    a: &Automaton<W>,
    kind: OrderKind,
) -> Result<StateOrder, CycleError> {
    let forest = FailureForest::new(a)?;
    let order = match kind {
        OrderKind::Kahn => reverse_topological(a)?,
        OrderKind::Greedy => greedy_reverse_topological(a, &forest)?,
    };
    let compatible = is_compatible(&order, &forest);
    Ok(StateOrder {
        kind,
        order,
        compatible,
    })
}

fn extract_cycle<W: Semiring>(a: &Automaton<W>, done: &[StateId]) -> CycleError {
    let n = a.n_states();
    let mut remaining = vec![true; n];
    for &q in done {
        remaining[q] = false;
    }
    let successor = |q: StateId| -> StateId {
        for (_, dsts) in a.symbol_groups(q) {
            for &(dst, _) in dsts {
                if remaining[dst] {
                    return dst;
                }
            }
        }
        if let Some(fb) = a.fallback_of(q) {
            if remaining[fb.dst] {
                return fb.dst;
            }
        }
        unreachable!("state outside the order must keep an edge into the remainder")
    };
    let start = (0..n)
        .find(|&q| remaining[q])
        .expect("some state is outside the order");
    let mut seen_at = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut q = start;
    loop {
        if seen_at[q] != usize::MAX {
            let cycle = path[seen_at[q]..]
                .iter()
                .map(|&s| a.state_name(s).to_string())
                .collect();
            return CycleError { cycle };
        }
        seen_at[q] = path.len();
        path.push(q);
        q = successor(q);
    }
}
