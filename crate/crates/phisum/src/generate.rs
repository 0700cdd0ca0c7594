//! Seeded instance families for testing and benchmarking.
//!
//! All generators are deterministic: the same parameters and seed produce
//! the same automaton, down to its printed form. Arcs and fallbacks always
//! point from lower to higher state ids, so every instance is acyclic by
//! construction.
//!
//! Three families:
//!
//! * [`random_automaton`]: arc, fallback, initial, and final placement drawn
//!   per-state from the given densities.
//! * [`braid`]: one failure tree whose two branches must be processed
//!   alternately by every state order, the worst case for aggregator reuse.
//! * [`lattice`]: layers of small failure trees chained by arcs, where
//!   orders that finish each tree before moving on stay cheap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::automaton::{Automaton, AutomatonBuilder};
use crate::semiring::Semiring;

/// Shape knobs for [`random_automaton`].
#[derive(Debug, Clone)]
pub struct RandomParams {
    pub states: usize,
    pub symbols: usize,
    /// Probability that a (state, symbol) pair has outgoing arcs.
    pub arc_density: f64,
    /// Probability that a non-last state has a fallback arc.
    pub fallback_density: f64,
    /// Give fallback arcs sampled weights instead of one.
    pub weighted_fallbacks: bool,
    /// Most destinations per (state, symbol); 1 keeps arcs deterministic.
    pub max_fanout: usize,
    /// Probability that a state has a nonzero initial weight.
    pub initial_density: f64,
    /// Probability that a state has a nonzero final weight.
    pub final_density: f64,
}

impl Default for RandomParams {
    fn default() -> Self {
        Self {
            states: 8,
            symbols: 3,
            arc_density: 0.3,
            fallback_density: 0.5,
            weighted_fallbacks: false,
            max_fanout: 1,
            initial_density: 0.4,
            final_density: 0.4,
        }
    }
}

/// Draws an automaton from the given densities. States are `q0..`, symbols
/// `s0..`; all of both are declared up front, so the alphabet size is
/// `params.symbols` even when some symbols end up unused.
pub fn random_automaton<W: Semiring>(params: &RandomParams, seed: u64) -> Automaton<W> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut b = AutomatonBuilder::new();
    let state = |i: usize| format!("q{i}");
    let symbol = |j: usize| format!("s{j}");
    for i in 0..params.states {
        b.state(&state(i));
    }
    for j in 0..params.symbols {
        b.add_symbol(&symbol(j))
            .expect("generated symbols are not reserved");
    }
    for i in 0..params.states {
        for j in 0..params.symbols {
            if i + 1 < params.states && rng.gen_bool(params.arc_density) {
                let mut targets: Vec<usize> = (i + 1..params.states).collect();
                let fanout = rng
                    .gen_range(1..=params.max_fanout.max(1))
                    .min(targets.len());
                for f in 0..fanout {
                    let pick = rng.gen_range(f..targets.len());
                    targets.swap(f, pick);
                    b.add_arc(
                        &state(i),
                        &state(targets[f]),
                        &symbol(j),
                        W::sample_nonzero(&mut rng),
                    )
                    .expect("generated symbols are not reserved");
                }
            }
        }
        if i + 1 < params.states && rng.gen_bool(params.fallback_density) {
            let dst = rng.gen_range(i + 1..params.states);
            let weight = params
                .weighted_fallbacks
                .then(|| W::sample_nonzero(&mut rng));
            b.set_fallback(&state(i), &state(dst), weight)
                .expect("each state gets at most one fallback");
        }
        if rng.gen_bool(params.initial_density) {
            b.add_initial(&state(i), W::sample_nonzero(&mut rng));
        }
        if rng.gen_bool(params.final_density) {
            b.add_final(&state(i), W::sample_nonzero(&mut rng));
        }
    }
    b.build()
}

/// One failure tree on states `1..=2k+2`: two branches hang off state 1
/// (the even states and the odd states), and the arcs `i -> i-1` force the
/// unique reverse topological order to alternate between the branches.
/// Every state is final so all path prefixes contribute.
pub fn braid<W: Semiring>(k: usize) -> Automaton<W> {
    let n = 2 * k + 2;
    let name = |i: usize| format!("{i}");
    let mut b = AutomatonBuilder::new();
    for i in 1..=n {
        b.state(&name(i));
    }
    b.set_fallback("2", "1", None).expect("fresh state");
    b.set_fallback("3", "1", None).expect("fresh state");
    for i in 4..=n {
        b.set_fallback(&name(i), &name(i - 2), None)
            .expect("fresh state");
    }
    for i in 3..=n {
        b.add_arc(&name(i), &name(i - 1), "a", W::one())
            .expect("plain symbol");
    }
    b.add_initial(&name(n), W::one());
    for i in 1..=n {
        b.add_final(&name(i), W::one());
    }
    b.build()
}

/// `layers` layers of two three-state failure trees each, arcs feeding the
/// next layer. Finishing each tree before starting the next keeps every
/// tree's aggregator moving down only, so tree-aware orders are compatible.
pub fn lattice<W: Semiring>(layers: usize) -> Automaton<W> {
    let mut b = AutomatonBuilder::new();
    let name = |kind: &str, tree: usize, layer: usize| format!("{kind}{tree}_{layer}");
    for l in 0..layers {
        for tree in 1..=2 {
            for kind in ["r", "x", "y"] {
                b.state(&name(kind, tree, l));
            }
        }
    }
    for l in 0..layers {
        for tree in 1..=2 {
            b.set_fallback(&name("x", tree, l), &name("r", tree, l), None)
                .expect("fresh state");
            b.set_fallback(&name("y", tree, l), &name("r", tree, l), None)
                .expect("fresh state");
            if l + 1 < layers {
                b.add_arc(&name("x", tree, l), &name("r", tree, l + 1), "a", W::one())
                    .expect("plain symbol");
                b.add_arc(&name("y", tree, l), &name("x", tree, l + 1), "b", W::one())
                    .expect("plain symbol");
                b.add_arc(&name("r", tree, l), &name("y", tree, l + 1), "c", W::one())
                    .expect("plain symbol");
            }
        }
    }
    for tree in 1..=2 {
        for kind in ["r", "x", "y"] {
            b.add_initial(&name(kind, tree, 0), W::one());
        }
    }
    for l in 0..layers {
        for tree in 1..=2 {
            for kind in ["r", "x", "y"] {
                b.add_final(&name(kind, tree, l), W::one());
            }
        }
    }
    b.build()
}
