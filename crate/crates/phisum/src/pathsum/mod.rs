//! Pathsum computation: the total weight of all complete paths.
//!
//! A complete path starts at any state, follows zero or more arcs, and ends
//! at any state; it contributes the product of its start's initial weight,
//! its arc weights, and its end's final weight. Fallback arcs stand for the
//! arcs a state inherits from its fallback target on symbols it lacks, so
//! they never appear in paths directly; every algorithm here accounts for
//! them without materializing all inherited arcs.
//!
//! Five interchangeable routes to the same total:
//!
//! * [`brute_force`]: materialize inherited arcs, then add up every path
//!   individually. Exponential, but an oracle the others are checked against.
//! * [`expand_backward`]: materialize inherited arcs, then one backward sweep.
//! * [`memo_backward`]: backward sweep keeping a per-state symbol table, with
//!   inherited entries copied from the fallback target's table.
//! * [`ring_backward`]: backward sweep that subtracts the overridden part of
//!   the fallback target's total instead of copying, for ring weights.
//! * [`general_backward`]: backward sweep sharing one aggregator per failure
//!   tree, repositioned by undoing updates as the sweep moves between states.
//!
//! Each run returns a [`PathsumRun`]: the total, per-state suffix sums, and a
//! [`PathsumReport`] of operation counts for cost comparisons.

mod backward;
mod brute;
mod general;

pub use backward::{expand_backward, memo_backward, ring_backward};
pub use brute::{brute_force, DEFAULT_PATH_BUDGET};
pub use general::{general_backward, general_backward_with, GeneralOptions};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregator::AggregatorStats;
use crate::automaton::{Automaton, StateId, SymbolId};
use crate::semiring::{Ring, Semiring, SemiringKind};
use crate::toposort::{CycleError, OrderKind};

/// The pathsum algorithms, as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmKind {
    Brute,
    Expand,
    Memo,
    Ring,
    General,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 5] = [
        AlgorithmKind::Brute,
        AlgorithmKind::Expand,
        AlgorithmKind::Memo,
        AlgorithmKind::Ring,
        AlgorithmKind::General,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmKind::Brute => "brute",
            AlgorithmKind::Expand => "expand",
            AlgorithmKind::Memo => "memo",
            AlgorithmKind::Ring => "ring",
            AlgorithmKind::General => "general",
        }
    }

    /// Checks that this algorithm can run over the given weight algebra.
    pub fn supports(self, semiring: SemiringKind) -> Result<(), CapabilityError> {
        match self {
            AlgorithmKind::Ring if !semiring.is_ring() => Err(CapabilityError {
                algorithm: self,
                semiring,
                required: "subtraction",
            }),
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for AlgorithmKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "brute" => Ok(AlgorithmKind::Brute),
            "expand" => Ok(AlgorithmKind::Expand),
            "memo" => Ok(AlgorithmKind::Memo),
            "ring" => Ok(AlgorithmKind::Ring),
            "general" => Ok(AlgorithmKind::General),
            _ => Err(format!(
                "unknown algorithm {s:?} (expected one of: brute, expand, memo, ring, general)"
            )),
        }
    }
}

/// An algorithm was asked to run over a weight algebra missing an operation
/// it needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error(
    "algorithm {algorithm} requires {required}, which the {semiring} semiring does not provide"
)]
pub struct CapabilityError {
    pub algorithm: AlgorithmKind,
    pub semiring: SemiringKind,
    pub required: &'static str,
}

/// Why a pathsum run could not produce a total.
#[derive(Debug, Clone, Error)]
pub enum PathsumError {
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error(transparent)]
    Capability(#[from] CapabilityError),
    #[error("more than {budget} paths; raise the path budget or use a non-enumerating algorithm")]
    PathBudgetExceeded { budget: u64 },
}

/// Semiring operations performed by algorithm code. Work done inside
/// aggregators is metered separately by [`AggregatorStats`].
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct OpCounters {
    pub oplus: u64,
    pub otimes: u64,
}

impl OpCounters {
    pub fn add<W: Semiring>(&mut self, x: W, y: W) -> W {
        self.oplus += 1;
        x.add(y)
    }

    pub fn mul<W: Semiring>(&mut self, x: W, y: W) -> W {
        self.otimes += 1;
        x.mul(y)
    }

    pub fn sub<W: Ring>(&mut self, x: W, y: W) -> W {
        self.oplus += 1;
        x.sub(y)
    }
}

/// Operation counts and the printable total for one pathsum run.
#[derive(Debug, Clone, Serialize)]
pub struct PathsumReport {
    pub z: String,
    pub algorithm: AlgorithmKind,
    pub semiring: SemiringKind,
    /// Order strategy used, when the algorithm sweeps states.
    pub order: Option<OrderKind>,
    /// Whether that order interleaves no two failure trees.
    pub compatible: Option<bool>,
    pub oplus: u64,
    pub otimes: u64,
    /// Per-symbol suffix sum evaluations, counting memoized hits.
    pub beta_qa: u64,
    pub visits: u64,
    pub leaves: u64,
    /// Aggregator key writes.
    pub sets: u64,
    /// Memo table entries copied, or aggregators cloned, depending on the
    /// algorithm.
    pub copies: u64,
    /// Arcs added by materializing inherited arcs, when the algorithm does.
    pub expanded_arcs: u64,
}

/// Final contents of one aggregator, for inspection after a run.
#[derive(Debug, Clone)]
pub struct AggregatorDump<W> {
    /// State whose inherited table the aggregator held when the sweep ended.
    pub frontier: StateId,
    /// Total of all stored values.
    pub value: W,
    /// Stored entries, ascending by symbol id.
    pub entries: Vec<(SymbolId, W)>,
}

/// A computed pathsum with its per-state breakdown.
#[derive(Debug, Clone)]
pub struct PathsumRun<W: Semiring> {
    /// Total weight of all complete paths.
    pub z: W,
    /// Per state: total weight of complete paths starting there, ignoring
    /// the initial weight.
    pub beta: Vec<W>,
    pub report: PathsumReport,
    /// Per state: aggregator fills it received (aggregator algorithm only).
    pub visit_counts: Vec<u32>,
    /// Stats per aggregator, in creation order (aggregator algorithm only).
    pub aggregator_stats: Vec<AggregatorStats>,
    /// Modeled cost charged for each aggregator copy, in creation order.
    pub copy_costs: Vec<u64>,
    /// States cut into their own aggregated piece, in the order the cuts
    /// were applied (aggregator algorithm only).
    pub split_states: Vec<StateId>,
    /// Final aggregator contents, in creation order (aggregator algorithm
    /// only).
    pub aggregator_dumps: Vec<AggregatorDump<W>>,
}

pub(crate) fn report_base<W: Semiring>(algorithm: AlgorithmKind, z: W) -> PathsumReport {
    PathsumReport {
        z: z.to_string(),
        algorithm,
        semiring: W::KIND,
        order: None,
        compatible: None,
        oplus: 0,
        otimes: 0,
        beta_qa: 0,
        visits: 0,
        leaves: 0,
        sets: 0,
        copies: 0,
        expanded_arcs: 0,
    }
}

/// Combines per-state suffix sums with initial weights into the total.
pub(crate) fn initial_combination<W: Semiring>(
    a: &Automaton<W>,
    beta: &[W],
    c: &mut OpCounters,
) -> W {
    let mut z = W::zero();
    for (q, &b) in beta.iter().enumerate() {
        let lambda = a.initial_weight(q);
        if lambda.is_zero() {
            continue;
        }
        let t = c.mul(lambda, b);
        z = c.add(z, t);
    }
    z
}
