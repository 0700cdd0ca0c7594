//! Helpers shared by the integration suites.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use phisum::aggregator::Aggregator;
use phisum::automaton::forest::FailureForest;
use phisum::automaton::stats::expanded_symbol_sets;
use phisum::automaton::{Automaton, AutomatonBuilder, StateId, SymbolId};
use phisum::generate::RandomParams;
use phisum::pathsum::PathsumRun;
use phisum::semiring::{Real, Semiring};
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture_text(name: &str) -> String {
    let path = fixture_path(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

/// Reference aggregator keeping a full map snapshot per update, so undo is
/// literal history rollback and every observable is defined by construction.
pub struct ModelAggregator<W> {
    history: Vec<BTreeMap<SymbolId, W>>,
}

impl<W: Semiring> ModelAggregator<W> {
    pub fn new() -> Self {
        Self {
            history: vec![BTreeMap::new()],
        }
    }

    fn current(&self) -> &BTreeMap<SymbolId, W> {
        self.history.last().expect("history starts non-empty")
    }

    pub fn set(&mut self, key: SymbolId, value: W) {
        let mut next = self.current().clone();
        next.insert(key, value);
        self.history.push(next);
    }

    pub fn mult(&mut self, m: W) {
        let next = self
            .current()
            .iter()
            .map(|(&k, &v)| (k, m.mul(v)))
            .collect();
        self.history.push(next);
    }

    pub fn undo(&mut self, n: usize) {
        assert!(n < self.history.len(), "model cannot undo {n} updates");
        self.history.truncate(self.history.len() - n);
    }

    pub fn undoable(&self) -> usize {
        self.history.len() - 1
    }

    pub fn get(&self, key: SymbolId) -> W {
        self.current().get(&key).copied().unwrap_or_else(W::zero)
    }

    pub fn value(&self) -> W {
        self.current()
            .values()
            .fold(W::zero(), |acc, &v| acc.add(v))
    }

    pub fn key_count(&self) -> usize {
        self.current().len()
    }

    pub fn keys(&self) -> Vec<SymbolId> {
        self.current().keys().copied().collect()
    }
}

/// Runs `ops` random updates against `agg` and the reference model side by
/// side, comparing every observable after each step, and finishes with a
/// full rollback that must leave the aggregator empty. With `node_bound`
/// set, each `set` must touch at most `2 * ceil(log2(keys)) + 2` distinct
/// tree nodes. Returns the number of updates performed.
#[allow(clippy::too_many_arguments)]
pub fn drive_aggregator<W, A, R>(
    agg: &mut A,
    rng: &mut R,
    ops: usize,
    key_space: usize,
    sample_value: &dyn Fn(&mut R) -> W,
    sample_factor: &dyn Fn(&mut R) -> W,
    same: &dyn Fn(W, W) -> bool,
    node_bound: bool,
    label: &str,
) -> usize
where
    W: Semiring,
    A: Aggregator<W>,
    R: Rng,
{
    let mut model = ModelAggregator::<W>::new();
    let mut updates = 0usize;
    for step in 0..ops {
        match rng.gen_range(0u32..10) {
            0..=5 => {
                let key = rng.gen_range(0..key_space);
                let value = if rng.gen_ratio(1, 10) {
                    W::zero()
                } else {
                    sample_value(rng)
                };
                agg.set(key, value);
                model.set(key, value);
                updates += 1;
                if node_bound {
                    let keys = agg.key_count().max(1);
                    let ceil_log = keys.ilog2() as u64 + u64::from(!keys.is_power_of_two());
                    let bound = 2 * ceil_log + 2;
                    let writes = agg.stats().last_set_node_writes;
                    assert!(
                        writes <= bound,
                        "{label} step {step}: set wrote {writes} nodes with {keys} keys \
                         (bound {bound})"
                    );
                }
            }
            6..=7 => {
                let m = sample_factor(rng);
                agg.mult(m);
                model.mult(m);
                updates += 1;
            }
            _ => {
                let available = model.undoable();
                if available > 0 {
                    let n = rng.gen_range(1..=available.min(24));
                    agg.undo(n).unwrap();
                    model.undo(n);
                }
            }
        }
        if model.undoable() > 256 {
            let n = model.undoable() - 128;
            agg.undo(n).unwrap();
            model.undo(n);
        }

        assert!(
            same(agg.value(), model.value()),
            "{label} step {step}: value {} vs model {}",
            agg.value(),
            model.value()
        );
        assert_eq!(
            agg.key_count(),
            model.key_count(),
            "{label} step {step}: key count"
        );
        let probe = rng.gen_range(0..key_space + 2);
        assert!(
            same(agg.get(probe), model.get(probe)),
            "{label} step {step}: get({probe}) is {} but the model holds {}",
            agg.get(probe),
            model.get(probe)
        );
        if step % 64 == 0 {
            assert_eq!(agg.keys(), model.keys(), "{label} step {step}: key sets");
            for k in model.keys() {
                assert!(
                    same(agg.get(k), model.get(k)),
                    "{label} step {step}: get({k}) is {} but the model holds {}",
                    agg.get(k),
                    model.get(k)
                );
            }
        }
        if step % 512 == 511 {
            let mut clone = agg.clone_snapshot();
            assert!(
                same(clone.value(), model.value()),
                "{label} step {step}: snapshot value"
            );
            assert_eq!(
                clone.keys(),
                model.keys(),
                "{label} step {step}: snapshot keys"
            );
            clone.set(0, sample_value(rng));
            assert!(
                same(agg.value(), model.value()),
                "{label} step {step}: mutating a snapshot leaked into the source"
            );
        }
    }

    let rest = model.undoable();
    agg.undo(rest).unwrap();
    assert!(
        agg.value().is_zero(),
        "{label}: full rollback must leave the sum at zero"
    );
    assert_eq!(
        agg.key_count(),
        0,
        "{label}: full rollback must un-intern every key"
    );
    assert!(
        agg.undo(1).is_err(),
        "{label}: history must be empty after full rollback"
    );
    updates
}

/// Two branches of two leaves under one root, all sharing one symbol, with
/// arcs chaining every state to the previously processed one. The only
/// reverse topological order alternates between the branches, so servicing
/// without cuts re-fills both branch heads for every leaf.
pub fn ladder() -> Automaton<Real> {
    let chain = ["r", "c1", "c2", "a1", "b1", "a2", "b2"];
    let mut b = AutomatonBuilder::new();
    for s in chain {
        b.state(s);
    }
    for pair in chain.windows(2) {
        b.add_arc(pair[1], pair[0], "p", Real(1.0)).unwrap();
    }
    for (src, dst) in [
        ("c1", "r"),
        ("c2", "r"),
        ("a1", "c1"),
        ("b1", "c2"),
        ("a2", "c1"),
        ("b2", "c2"),
    ] {
        b.set_fallback(src, dst, None).unwrap();
    }
    b.add_initial("b2", Real(1.0));
    for s in chain {
        b.add_final(s, Real(1.0));
    }
    b.build()
}

/// Worst-case modeled write units with the given cut states active, computed
/// from raw fallback arcs only: every state pays the symbol count of each
/// non-anchor chain ancestor (itself included) once, where anchors are the
/// cuts plus states without a fallback.
pub fn reference_update_cost<W: Semiring>(
    a: &Automaton<W>,
    cuts: &BTreeSet<StateId>,
    unit: f64,
) -> f64 {
    let n = a.n_states();
    let parent: Vec<Option<StateId>> = (0..n).map(|q| a.fallback_of(q).map(|f| f.dst)).collect();
    let mut cost = 0.0;
    for q in 0..n {
        let mut x = q;
        while !cuts.contains(&x) && parent[x].is_some() {
            cost += a.out_degree(x) as f64 * unit;
            x = parent[x].unwrap();
        }
    }
    cost
}

/// Write units a run spent filling non-anchor states, with anchors being the
/// states without a fallback plus the run's cut states.
pub fn measured_update_cost<W: Semiring>(a: &Automaton<W>, run: &PathsumRun<W>) -> f64 {
    let anchors: BTreeSet<StateId> = run
        .split_states
        .iter()
        .copied()
        .chain((0..a.n_states()).filter(|&q| a.fallback_of(q).is_none()))
        .collect();
    (0..a.n_states())
        .filter(|q| !anchors.contains(q))
        .map(|q| f64::from(run.visit_counts[q]) * a.out_degree(q) as f64)
        .sum()
}

/// Modeled units of aggregator work in a run: every fill pays the filled
/// state's symbol count, plus the charged copy costs.
pub fn run_model_cost<W: Semiring>(a: &Automaton<W>, run: &PathsumRun<W>) -> u64 {
    let fills: u64 = (0..a.n_states())
        .map(|q| u64::from(run.visit_counts[q]) * a.out_degree(q) as u64)
        .sum();
    fills + run.copy_costs.iter().sum::<u64>()
}

/// Modeled units for copying at every fallback state instead of undoing:
/// each fallback state clones its target's full inherited table and fills its
/// own symbols on top; each non-singleton tree root fills its own symbols.
pub fn always_copy_cost<W: Semiring>(a: &Automaton<W>) -> u64 {
    let forest = FailureForest::new(a).expect("acyclic instance");
    let expanded = expanded_symbol_sets(a, &forest);
    let mut units = 0u64;
    for q in 0..a.n_states() {
        match a.fallback_of(q) {
            Some(fb) => units += expanded[fb.dst].len() as u64 + a.out_degree(q) as u64,
            None => {
                if forest.subtree_size(q) > 1 {
                    units += a.out_degree(q) as u64;
                }
            }
        }
    }
    units
}

/// Deterministic spread of generator shapes, indexed so consecutive values
/// of `i` vary every knob.
pub fn grid_params(i: u64) -> RandomParams {
    RandomParams {
        states: 2 + (i % 9) as usize,
        symbols: 1 + (i % 4) as usize,
        arc_density: [0.15, 0.3, 0.45][(i % 3) as usize],
        fallback_density: [0.0, 0.3, 0.7][((i / 3) % 3) as usize],
        weighted_fallbacks: i % 2 == 1,
        max_fanout: 1 + (i % 3) as usize,
        ..RandomParams::default()
    }
}
