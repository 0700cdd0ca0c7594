//! Choosing where to cut failure trees into independently aggregated pieces.
//!
//! When one aggregator serves a whole failure tree, positioning it for a deep
//! state may re-fill every tree ancestor of that state, so in the worst case a
//! state `q` with `d(q)` symbols on its chain above the piece root costs
//! `d(q)` writes each time it is served. Cutting the tree at `q` replaces that
//! repeated work with a one-time aggregator copy. This module prices both
//! sides of the trade and finds the best set of cut points.
//!
//! Costs are expressed in write units: an aggregator write costs `c_u` units
//! (callers pass 1, or `log2 |alphabet|` to model tree-backed aggregators),
//! and a copy costs one unit per alphabet symbol.

use serde::{Deserialize, Serialize};

use crate::automaton::forest::FailureForest;
use crate::automaton::{Automaton, StateId};
use crate::semiring::Semiring;

/// Failure-tree splitting strategy for the aggregator-based pathsum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitMode {
    /// One aggregator per failure tree.
    None,
    /// Copy the aggregator at a state once serving it has cost more than a
    /// copy would.
    Dynamic,
    /// Cut trees up front at the states chosen by [`optimal_static_split`].
    Static,
}

impl SplitMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitMode::None => "none",
            SplitMode::Dynamic => "dynamic",
            SplitMode::Static => "static",
        }
    }
}

impl std::fmt::Display for SplitMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SplitMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(SplitMode::None),
            "dynamic" => Ok(SplitMode::Dynamic),
            "static" => Ok(SplitMode::Static),
            _ => Err(format!(
                "unknown split mode {s:?} (expected one of: none, dynamic, static)"
            )),
        }
    }
}

/// What one aggregator copy is assumed to cost, in write units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CopyCostModel {
    /// One unit per key the source aggregator currently holds, plus one per
    /// symbol the new root writes on top. Matches aggregators that only store
    /// keys they have seen.
    InternedKeys,
    /// One unit per alphabet symbol, regardless of occupancy.
    FullAlphabet,
}

impl CopyCostModel {
    /// Cost of copying an aggregator holding `interned_keys` keys so that a
    /// state with `own_symbols` outgoing symbols can become a new root.
    pub fn cost(self, interned_keys: usize, own_symbols: usize, alphabet: usize) -> u64 {
        match self {
            CopyCostModel::InternedKeys => (interned_keys + own_symbols) as u64,
            CopyCostModel::FullAlphabet => alphabet as u64,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CopyCostModel::InternedKeys => "interned-keys",
            CopyCostModel::FullAlphabet => "full-alphabet",
        }
    }
}

impl std::fmt::Display for CopyCostModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CopyCostModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "interned-keys" => Ok(CopyCostModel::InternedKeys),
            "full-alphabet" => Ok(CopyCostModel::FullAlphabet),
            _ => Err(format!(
                "unknown copy cost model {s:?} (expected one of: interned-keys, full-alphabet)"
            )),
        }
    }
}

/// A set of cut states together with the improvement the cost model predicts
/// for cutting there, in write units.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticSplitPlan {
    /// States that become roots of their own piece, ascending by id.
    pub splits: Vec<StateId>,
    /// Modeled worst-case units saved, net of copy charges. Never negative:
    /// the empty plan is always an option.
    pub predicted: f64,
}

/// Symbols on the chain from each state up to, but not including, its tree
/// root, counting the state itself.
fn chain_symbol_depths<W: Semiring>(a: &Automaton<W>, forest: &FailureForest) -> Vec<u64> {
    let mut order: Vec<StateId> = (0..a.n_states()).collect();
    order.sort_by_key(|&q| (forest.chain_len(q), q));
    let mut depth = vec![0u64; a.n_states()];
    for q in order {
        if let Some(p) = forest.parent(q) {
            depth[q] = a.out_degree(q) as u64 + depth[p];
        }
    }
    depth
}

/// Finds the set of cut states minimizing the modeled worst-case cost, by
/// dynamic programming over (state, nearest cut ancestor) pairs.
///
/// Cutting at `q` saves `(d(q) - d(anchor)) * subtree_size(q) * c_u` units,
/// where `d` is the chain symbol depth and the anchor is the nearest cut at
/// or above `q`'s parent, and charges one copy of `|alphabet|` units. Ties
/// are resolved against cutting.
pub fn optimal_static_split<W: Semiring>(
    a: &Automaton<W>,
    forest: &FailureForest,
    c_u: f64,
) -> StaticSplitPlan {
    let n = a.n_states();
    let depth = chain_symbol_depths(a, forest);
    let alphabet = a.n_symbols() as f64;

    // bar[q][i]: best improvement from q's subtree when the nearest cut above
    // q has chain length i + 1. cut[q][i]: whether cutting at q achieves it.
    let mut bar: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut cut: Vec<Vec<bool>> = vec![Vec::new(); n];

    let mut order: Vec<StateId> = (0..n).collect();
    order.sort_by_key(|&q| (std::cmp::Reverse(forest.chain_len(q)), q));

    for &q in &order {
        let len = forest.chain_len(q) as usize;
        if forest.is_root(q) {
            continue;
        }
        let mut child_sums = vec![0.0f64; len];
        for &p in forest.children(q) {
            for (i, sum) in child_sums.iter_mut().enumerate() {
                *sum += bar[p][i];
            }
        }
        let mut anchor_depth = vec![0u64; len - 1];
        let mut p = forest.parent(q);
        while let Some(anc) = p {
            anchor_depth[forest.chain_len(anc) as usize - 1] = depth[anc];
            p = forest.parent(anc);
        }

        let sum_if_cut = child_sums[len - 1];
        let mut best = Vec::with_capacity(len - 1);
        let mut chose_cut = Vec::with_capacity(len - 1);
        for i in 0..len - 1 {
            let gain = (depth[q] - anchor_depth[i]) as f64 * forest.subtree_size(q) as f64 * c_u;
            let if_cut = sum_if_cut + gain - alphabet;
            let if_kept = child_sums[i];
            chose_cut.push(if_cut > if_kept);
            best.push(if_cut.max(if_kept));
        }
        bar[q] = best;
        cut[q] = chose_cut;
    }

    let mut predicted = 0.0;
    let mut splits = Vec::new();
    for &r in forest.roots() {
        let mut stack: Vec<(StateId, usize)> = forest.children(r).iter().map(|&p| (p, 0)).collect();
        for &p in forest.children(r) {
            predicted += bar[p][0];
        }
        while let Some((q, anchor)) = stack.pop() {
            let next_anchor = if cut[q][anchor] {
                splits.push(q);
                forest.chain_len(q) as usize - 1
            } else {
                anchor
            };
            for &p in forest.children(q) {
                stack.push((p, next_anchor));
            }
        }
    }
    splits.sort_unstable();
    StaticSplitPlan { splits, predicted }
}

/// The best improvement achievable by cutting at a single state, with its cut
/// state. `None` when no state has a fallback. The improvement may be
/// negative when every single cut costs more than it saves.
pub fn best_single_split<W: Semiring>(
    a: &Automaton<W>,
    forest: &FailureForest,
    c_u: f64,
) -> Option<(StateId, f64)> {
    let depth = chain_symbol_depths(a, forest);
    let alphabet = a.n_symbols() as f64;
    (0..a.n_states())
        .filter(|&q| !forest.is_root(q))
        .map(|q| {
            let gain = depth[q] as f64 * forest.subtree_size(q) as f64 * c_u;
            (q, gain - alphabet)
        })
        .max_by(|(qa, va), (qb, vb)| va.partial_cmp(vb).unwrap().then(qb.cmp(qa)))
}

/// Modeled worst-case write units for serving every state once with the given
/// cuts active: each non-root state `q` of a piece charges its symbol count
/// once per state of that piece reaching the root through it. Piece roots and
/// the copies that create them are excluded; [`StaticSplitPlan::predicted`]
/// already nets copies out.
pub fn worst_case_update_cost<W: Semiring>(
    a: &Automaton<W>,
    forest: &FailureForest,
    splits: &[StateId],
    c_u: f64,
) -> f64 {
    let n = a.n_states();
    let mut is_cut = vec![false; n];
    for &q in splits {
        is_cut[q] = true;
    }
    let piece_root = |mut q: StateId| -> StateId {
        loop {
            if is_cut[q] || forest.is_root(q) {
                return q;
            }
            q = forest.parent(q).expect("non-root state has a parent");
        }
    };
    let roots: Vec<StateId> = (0..n).map(&piece_root).collect();

    let mut cost = 0.0;
    for q in 0..n {
        if roots[q] == q {
            continue;
        }
        let piece_subtree = (0..n)
            .filter(|&p| roots[p] == roots[q] && forest.falls_back_through(p, q))
            .count();
        cost += a.out_degree(q) as f64 * piece_subtree as f64 * c_u;
    }
    cost
}
