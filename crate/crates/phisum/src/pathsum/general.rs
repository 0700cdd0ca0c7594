//! Backward sweep sharing one aggregator per failure tree.
//!
//! States of one failure tree see overlapping inherited symbol sets, so
//! instead of rebuilding a symbol table per state, one aggregator per tree
//! is moved around: filling a state's own symbols on top of its fallback
//! chain's entries makes the aggregator hold that state's entire inherited
//! table, and undoing those fills moves it back up the chain. Serving a
//! state therefore costs one fill per chain step between it and the
//! aggregator's current position, which is cheap exactly when the state
//! order stays inside one branch at a time.
//!
//! Trees can additionally be cut into independently aggregated pieces,
//! either up front ([`crate::splitting::optimal_static_split`]) or on the
//! fly once a state has been re-filled often enough that a dedicated copy
//! of the aggregator would have been cheaper.

use super::{
    initial_combination, report_base, AggregatorDump, AlgorithmKind, OpCounters, PathsumError,
    PathsumRun,
};
use crate::aggregator::Aggregator;
use crate::automaton::forest::FailureForest;
use crate::automaton::{Automaton, StateId, SymbolId};
use crate::semiring::Semiring;
use crate::splitting::{optimal_static_split, CopyCostModel, SplitMode};
use crate::toposort::{build_order, OrderKind};

/// Knobs for [`general_backward`].
#[derive(Debug, Clone)]
pub struct GeneralOptions {
    pub order: OrderKind,
    pub split: SplitMode,
    /// What the dynamic strategy assumes one aggregator copy costs.
    pub copy_cost: CopyCostModel,
    /// Cut states to apply when `split` is `Static`. Computed by
    /// [`optimal_static_split`] when absent; entries naming tree roots are
    /// ignored.
    pub static_plan: Option<Vec<StateId>>,
    /// Per-write unit cost handed to the static planner.
    pub split_unit_cost: f64,
}

impl Default for GeneralOptions {
    fn default() -> Self {
        Self {
            order: OrderKind::Kahn,
            split: SplitMode::None,
            copy_cost: CopyCostModel::InternedKeys,
            static_plan: None,
            split_unit_cost: 1.0,
        }
    }
}

/// [`general_backward_with`] using the aggregator variant the semiring's
/// capabilities admit.
pub fn general_backward<W: crate::aggregator::DefaultAggregator>(
    a: &Automaton<W>,
    options: &GeneralOptions,
) -> Result<PathsumRun<W>, PathsumError> {
    general_backward_with::<W, W::Agg>(a, options)
}

/// Aggregator-per-tree backward sweep with an explicitly chosen aggregator
/// implementation.
pub fn general_backward_with<W: Semiring, A: Aggregator<W>>(
    a: &Automaton<W>,
    options: &GeneralOptions,
) -> Result<PathsumRun<W>, PathsumError> {
    let forest = FailureForest::new(a)?;
    let state_order = build_order(a, options.order)?;
    let n = a.n_states();

    let plan: Vec<StateId> = match options.split {
        SplitMode::Static => match &options.static_plan {
            Some(p) => p.clone(),
            None => optimal_static_split(a, &forest, options.split_unit_cost).splits,
        },
        _ => Vec::new(),
    };
    let mut pending = vec![false; n];
    for &q in &plan {
        if !forest.is_root(q) {
            pending[q] = true;
        }
    }
    let dynamic = options.split == SplitMode::Dynamic;

    let mut marked = vec![false; n];
    for &r in forest.roots() {
        marked[r] = true;
    }
    let mut runner: Runner<'_, W, A> = Runner {
        a,
        forest: &forest,
        weighted: a.weighted_fallbacks(),
        model: options.copy_cost,
        trees: Vec::new(),
        tree_of: vec![None; n],
        marked,
        spent: vec![0; n],
        beta: vec![W::zero(); n],
        visit_counts: vec![0; n],
        copy_costs: Vec::new(),
        split_states: Vec::new(),
        c: OpCounters::default(),
        visits: 0,
        leaves: 0,
        copies: 0,
    };

    for &q in &state_order.order {
        if runner.forest.is_root(q) {
            if runner.forest.subtree_size(q) == 1 {
                let mut v = a.final_weight(q);
                for (_sym, val) in runner.symbol_values(q) {
                    v = runner.c.add(v, val);
                }
                runner.beta[q] = v;
            } else {
                let idx = runner.trees.len();
                runner.trees.push(Tree {
                    agg: A::new(),
                    frontier: q,
                });
                runner.tree_of[q] = Some(idx);
                runner.visit(idx, q);
                runner.finish(idx, q);
            }
            continue;
        }

        let parent = runner
            .forest
            .parent(q)
            .expect("non-root state has a parent");
        if pending[q] {
            pending[q] = false;
            let root = runner.resolve(parent);
            let parent_idx = runner.tree_of[root].expect("effective roots own a tree");
            let parent_idx = runner.serve(parent_idx, parent, false);
            let charge = a.n_symbols() as u64;
            let idx = runner.split_off(parent_idx, q, charge);
            runner.finish(idx, q);
            continue;
        }

        let root = runner.resolve(q);
        let idx = runner.tree_of[root].expect("effective roots own a tree");
        let idx = runner.serve(idx, q, dynamic);
        runner.finish(idx, q);
    }

    let mut c = runner.c;
    let z = initial_combination(a, &runner.beta, &mut c);

    let mut report = report_base(AlgorithmKind::General, z);
    report.order = Some(options.order);
    report.compatible = Some(state_order.compatible);
    report.oplus = c.oplus;
    report.otimes = c.otimes;
    report.visits = runner.visits;
    report.leaves = runner.leaves;
    report.copies = runner.copies;
    report.sets = runner.trees.iter().map(|t| t.agg.stats().sets).sum();
    let aggregator_dumps = runner
        .trees
        .iter()
        .map(|t| AggregatorDump {
            frontier: t.frontier,
            value: t.agg.value(),
            entries: t
                .agg
                .keys()
                .into_iter()
                .map(|k| (k, t.agg.get(k)))
                .collect(),
        })
        .collect();
    Ok(PathsumRun {
        z,
        beta: runner.beta,
        report,
        visit_counts: runner.visit_counts,
        aggregator_stats: runner.trees.iter().map(|t| t.agg.stats().clone()).collect(),
        copy_costs: runner.copy_costs,
        split_states: runner.split_states,
        aggregator_dumps,
    })
}

struct Tree<A> {
    agg: A,
    /// The state whose inherited table the aggregator currently holds.
    frontier: StateId,
}

struct Runner<'a, W: Semiring, A> {
    a: &'a Automaton<W>,
    forest: &'a FailureForest,
    weighted: bool,
    model: CopyCostModel,
    trees: Vec<Tree<A>>,
    /// Piece root to its tree, for roots whose piece has begun.
    tree_of: Vec<Option<usize>>,
    /// Piece roots: original tree roots plus every cut applied so far.
    marked: Vec<bool>,
    /// Write units spent re-filling each state, for the dynamic trigger.
    spent: Vec<u64>,
    beta: Vec<W>,
    visit_counts: Vec<u32>,
    copy_costs: Vec<u64>,
    split_states: Vec<StateId>,
    c: OpCounters,
    visits: u64,
    leaves: u64,
    copies: u64,
}

impl<W: Semiring, A: Aggregator<W>> Runner<'_, W, A> {
    /// Suffix sum per outgoing symbol of `q`, from its arc targets' totals.
    fn symbol_values(&mut self, q: StateId) -> Vec<(SymbolId, W)> {
        let a = self.a;
        a.symbol_groups(q)
            .map(|(sym, arcs)| {
                let mut v = W::zero();
                for &(dst, w) in arcs {
                    let t = self.c.mul(w, self.beta[dst]);
                    v = self.c.add(v, t);
                }
                (sym, v)
            })
            .collect()
    }

    /// Nearest piece root on the fallback chain of `q`, including `q`.
    fn resolve(&self, mut q: StateId) -> StateId {
        while !self.marked[q] {
            q = self
                .forest
                .parent(q)
                .expect("original tree roots are marked");
        }
        q
    }

    /// Pushes `q`'s own entries onto the tree, making it hold `q`'s full
    /// inherited table. Requires the frontier to be `q`'s fallback target
    /// (or `q` to be the piece root on its first fill).
    fn visit(&mut self, idx: usize, q: StateId) {
        self.visits += 1;
        self.visit_counts[q] += 1;
        let values = self.symbol_values(q);
        if self.weighted {
            if let Some(fb) = self.a.fallback_of(q) {
                self.trees[idx].agg.mult(fb.weight);
            }
        }
        for (sym, v) in values {
            self.trees[idx].agg.set(sym, v);
        }
        self.trees[idx].frontier = q;
    }

    /// Reverts the frontier state's entries, moving the tree one chain step
    /// up.
    fn leave(&mut self, idx: usize) {
        let f = self.trees[idx].frontier;
        let mut updates = self.a.out_degree(f);
        if self.weighted && self.a.fallback_of(f).is_some() {
            updates += 1;
        }
        self.trees[idx]
            .agg
            .undo(updates)
            .expect("frontier entries are the newest updates");
        self.leaves += 1;
        self.trees[idx].frontier = self.forest.parent(f).expect("piece roots are never left");
    }

    /// Moves the tree to hold `target`'s inherited table: undo entries until
    /// the frontier is on `target`'s chain, then fill back down to `target`.
    /// With `dynamic`, each fill first checks whether the state has been
    /// re-filled often enough to deserve its own aggregator copy; the fill
    /// then lands on the copy, and subsequent fills continue there. Returns
    /// the tree holding `target`.
    fn serve(&mut self, mut idx: usize, target: StateId, dynamic: bool) -> usize {
        while !self
            .forest
            .falls_back_through(target, self.trees[idx].frontier)
        {
            self.leave(idx);
        }
        let mut chain = Vec::new();
        let mut x = target;
        while x != self.trees[idx].frontier {
            chain.push(x);
            x = self
                .forest
                .parent(x)
                .expect("frontier lies on the target's chain");
        }
        for &x in chain.iter().rev() {
            if dynamic {
                let fill = self.a.out_degree(x) as u64;
                let charge = self.model.cost(
                    self.trees[idx].agg.key_count(),
                    self.a.out_degree(x),
                    self.a.n_symbols(),
                );
                if self.spent[x] + fill > charge {
                    idx = self.split_off(idx, x, charge);
                    continue;
                }
                self.spent[x] += fill;
            }
            self.visit(idx, x);
        }
        idx
    }

    /// Cuts the tree at `x`: clones the aggregator (which must hold `x`'s
    /// fallback target) and fills `x` on the clone, making `x` a piece root.
    /// The source tree stays positioned where it was.
    fn split_off(&mut self, parent_idx: usize, x: StateId, charge: u64) -> usize {
        self.copies += 1;
        self.copy_costs.push(charge);
        self.split_states.push(x);
        let clone = self.trees[parent_idx].agg.clone_snapshot();
        let idx = self.trees.len();
        self.trees.push(Tree {
            agg: clone,
            frontier: self.trees[parent_idx].frontier,
        });
        self.marked[x] = true;
        self.tree_of[x] = Some(idx);
        self.visit(idx, x);
        idx
    }

    /// Records `q`'s total: its final weight plus the tree's sum over `q`'s
    /// inherited table.
    fn finish(&mut self, idx: usize, q: StateId) {
        let v = self.trees[idx].agg.value();
        self.beta[q] = self.c.add(self.a.final_weight(q), v);
    }
}
