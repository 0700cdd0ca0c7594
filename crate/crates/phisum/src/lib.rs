//! Pathsums over acyclic weighted finite-state automata with failure
//! (fallback) transitions.
//!
//! A fallback arc lets a state delegate the symbols it cannot consume to
//! another state, which keeps sparse automata (backoff language models,
//! pattern matchers) small. This crate computes the total weight of all
//! accepting paths of such an automaton, generically over a [`semiring`],
//! by several routes that are cross-checked against each other:
//!
//! * brute-force path enumeration over the expanded automaton;
//! * explicit fallback [`automaton::expand`]sion followed by an ordinary
//!   backward pass;
//! * a memoizing backward pass that materializes per-state symbol values;
//! * a subtraction-based backward pass for ring weights;
//! * an aggregator-based backward pass that shares per-symbol values along
//!   failure trees, with pluggable [`aggregator`] structures and optional
//!   tree [`splitting`].
//!
//! All entry points live in [`pathsum`]; [`generate`] produces seeded random
//! and structured instances for testing and benchmarks.

pub mod aggregator;
pub mod automaton;
pub mod generate;
pub mod pathsum;
pub mod semiring;
pub mod splitting;
pub mod toposort;
