//! Pathsum by exhaustive path enumeration.

use super::{
    initial_combination, report_base, AlgorithmKind, OpCounters, PathsumError, PathsumRun,
};
use crate::automaton::expand::expand;
use crate::automaton::{Automaton, StateId};
use crate::semiring::Semiring;

/// Paths enumerated before [`brute_force`] gives up.
pub const DEFAULT_PATH_BUDGET: u64 = 1_000_000;

/// Materializes inherited arcs, then walks out every path from every state
/// and adds up its contribution. Exponential in general; `budget` caps the
/// number of paths walked. This is the reference the sweep algorithms are
/// verified against, so it shares no traversal machinery with them.
pub fn brute_force<W: Semiring>(
    a: &Automaton<W>,
    budget: u64,
) -> Result<PathsumRun<W>, PathsumError> {
    let (expanded, added) = expand(a)?;
    let n = expanded.n_states();
    let mut c = OpCounters::default();
    let mut walked = 0u64;
    let mut beta = vec![W::zero(); n];
    for (q, b) in beta.iter_mut().enumerate() {
        let mut acc = W::zero();
        walk(
            &expanded,
            q,
            W::one(),
            &mut acc,
            &mut walked,
            budget,
            &mut c,
        )?;
        *b = acc;
    }
    let z = initial_combination(&expanded, &beta, &mut c);

    let mut report = report_base(AlgorithmKind::Brute, z);
    report.oplus = c.oplus;
    report.otimes = c.otimes;
    report.expanded_arcs = added as u64;
    Ok(PathsumRun {
        z,
        beta,
        report,
        visit_counts: vec![0; n],
        aggregator_stats: Vec::new(),
        copy_costs: Vec::new(),
        split_states: Vec::new(),
        aggregator_dumps: Vec::new(),
    })
}

/// Adds the contribution of every path extending `prefix` from `q`,
/// including the empty extension ending at `q`.
fn walk<W: Semiring>(
    a: &Automaton<W>,
    q: StateId,
    prefix: W,
    acc: &mut W,
    walked: &mut u64,
    budget: u64,
    c: &mut OpCounters,
) -> Result<(), PathsumError> {
    *walked += 1;
    if *walked > budget {
        return Err(PathsumError::PathBudgetExceeded { budget });
    }
    let rho = a.final_weight(q);
    if !rho.is_zero() {
        let t = c.mul(prefix, rho);
        *acc = c.add(*acc, t);
    }
    for (_sym, arcs) in a.symbol_groups(q) {
        for &(dst, w) in arcs {
            let extended = c.mul(prefix, w);
            walk(a, dst, extended, acc, walked, budget, c)?;
        }
    }
    Ok(())
}
