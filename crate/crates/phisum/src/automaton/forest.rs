//! The forest induced by fallback arcs.
//!
//! Every state appears exactly once: states without a fallback arc are roots
//! (possibly of singleton trees) and each other state hangs below its
//! fallback target. A depth-first traversal stamps every state with an
//! entry/exit interval from one global clock, so "does `t` lie on `q`'s
//! fallback chain" becomes a constant-time interval containment test.

use crate::automaton::{Automaton, StateId};
use crate::semiring::Semiring;
use crate::toposort::CycleError;

/// Fallback structure of an automaton: parent/child links, per-tree DFS
/// intervals, chain lengths, and subtree populations.
#[derive(Debug, Clone)]
pub struct FailureForest {
    parent: Vec<Option<StateId>>,
    children: Vec<Vec<StateId>>,
    roots: Vec<StateId>,
    root_of: Vec<StateId>,
    enter: Vec<u64>,
    exit: Vec<u64>,
    /// Number of states on the fallback chain from the state to its root,
    /// including both ends (1 for a root).
    ancs: Vec<u32>,
    /// Number of states whose fallback chain passes through the state,
    /// including the state itself (1 for a leaf).
    subtree: Vec<u32>,
}

impl FailureForest {
    pub fn new<W: Semiring>(a: &Automaton<W>) -> Result<Self, CycleError> {
        let n = a.n_states();
        let mut parent: Vec<Option<StateId>> = vec![None; n];
        let mut children: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (q, p) in parent.iter_mut().enumerate() {
            if let Some(fb) = a.fallback_of(q) {
                *p = Some(fb.dst);
                children[fb.dst].push(q);
            }
        }
        for c in &mut children {
            c.sort_unstable();
        }
        let roots: Vec<StateId> = (0..n).filter(|&q| parent[q].is_none()).collect();

        let mut root_of = vec![usize::MAX; n];
        let mut enter = vec![0u64; n];
        let mut exit = vec![0u64; n];
        let mut ancs = vec![0u32; n];
        let mut subtree = vec![1u32; n];
        let mut clock = 0u64;
        let mut stack: Vec<(StateId, usize)> = Vec::new();
        for &r in &roots {
            ancs[r] = 1;
            root_of[r] = r;
            clock += 1;
            enter[r] = clock;
            stack.push((r, 0));
            while let Some(&mut (q, ref mut next)) = stack.last_mut() {
                if *next < children[q].len() {
                    let c = children[q][*next];
                    *next += 1;
                    ancs[c] = ancs[q] + 1;
                    root_of[c] = root_of[q];
                    clock += 1;
                    enter[c] = clock;
                    stack.push((c, 0));
                } else {
                    clock += 1;
                    exit[q] = clock;
                    stack.pop();
                    if let Some(p) = parent[q] {
                        subtree[p] += subtree[q];
                    }
                }
            }
        }
        if let Some(start) = (0..n).find(|&q| root_of[q] == usize::MAX) {
            return Err(extract_fallback_cycle(a, &parent, start));
        }
        Ok(Self {
            parent,
            children,
            roots,
            root_of,
            enter,
            exit,
            ancs,
            subtree,
        })
    }

    pub fn n_states(&self) -> usize {
        self.parent.len()
    }

    /// Fallback target, if any.
    pub fn parent(&self, q: StateId) -> Option<StateId> {
        self.parent[q]
    }

    /// States whose fallback arc points at `q`, ascending by id.
    pub fn children(&self, q: StateId) -> &[StateId] {
        &self.children[q]
    }

    /// Tree roots (states without a fallback arc), ascending by id.
    pub fn roots(&self) -> &[StateId] {
        &self.roots
    }

    pub fn is_root(&self, q: StateId) -> bool {
        self.parent[q].is_none()
    }

    pub fn root_of(&self, q: StateId) -> StateId {
        self.root_of[q]
    }

    /// Length of the fallback chain from `q` to its root, counting both ends.
    pub fn chain_len(&self, q: StateId) -> u32 {
        self.ancs[q]
    }

    /// Number of states whose fallback chain passes through `q`, counting
    /// `q` itself.
    pub fn subtree_size(&self, q: StateId) -> u32 {
        self.subtree[q]
    }

    /// True when `t` lies on `q`'s fallback chain (including `t == q`).
    pub fn falls_back_through(&self, q: StateId, t: StateId) -> bool {
        self.enter[t] <= self.enter[q] && self.exit[q] <= self.exit[t]
    }
}

fn extract_fallback_cycle<W: Semiring>(
    a: &Automaton<W>,
    parent: &[Option<StateId>],
    start: StateId,
) -> CycleError {
    let mut seen_at = vec![usize::MAX; parent.len()];
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
        q = parent[q].expect("an unrooted state keeps a fallback link");
    }
}
