//! Single-sweep backward pathsums.
//!
//! All three entry points process states in reverse topological order of the
//! combined arc/fallback graph, so every arc target and fallback target is
//! finished before its source. They differ in how a state picks up the
//! suffix sums it inherits through its fallback arc.

use std::collections::BTreeMap;

use super::{
    initial_combination, report_base, AlgorithmKind, OpCounters, PathsumError, PathsumRun,
};
use crate::automaton::expand::expand;
use crate::automaton::{Automaton, StateId, SymbolId};
use crate::semiring::{Ring, Semiring};
use crate::toposort::{build_order, OrderKind};

/// Materializes inherited arcs up front, then runs a plain backward sweep
/// over the result, which has no fallback arcs left.
pub fn expand_backward<W: Semiring>(
    a: &Automaton<W>,
    order: OrderKind,
) -> Result<PathsumRun<W>, PathsumError> {
    let (expanded, added) = expand(a)?;
    let state_order = build_order(&expanded, order)?;
    let n = expanded.n_states();
    let mut c = OpCounters::default();
    let mut beta = vec![W::zero(); n];
    for &q in &state_order.order {
        let mut v = expanded.final_weight(q);
        for (_sym, arcs) in expanded.symbol_groups(q) {
            for &(dst, w) in arcs {
                let t = c.mul(w, beta[dst]);
                v = c.add(v, t);
            }
        }
        beta[q] = v;
    }
    let z = initial_combination(&expanded, &beta, &mut c);

    let mut report = report_base(AlgorithmKind::Expand, z);
    report.order = Some(order);
    report.compatible = Some(state_order.compatible);
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

/// Backward sweep keeping, per state, a table of per-symbol suffix sums.
/// A state's table holds its own symbols plus copies of every entry its
/// fallback target's table has for symbols it lacks, so tables grow to the
/// inherited symbol sets without touching the arc structure.
pub fn memo_backward<W: Semiring>(
    a: &Automaton<W>,
    order: OrderKind,
) -> Result<PathsumRun<W>, PathsumError> {
    let state_order = build_order(a, order)?;
    let n = a.n_states();
    let weighted = a.weighted_fallbacks();
    let mut c = OpCounters::default();
    let mut beta = vec![W::zero(); n];
    let mut tables: Vec<BTreeMap<SymbolId, W>> = vec![BTreeMap::new(); n];
    let mut copies = 0u64;
    for &q in &state_order.order {
        let mut table = BTreeMap::new();
        for (sym, arcs) in a.symbol_groups(q) {
            let mut v = W::zero();
            for &(dst, w) in arcs {
                let t = c.mul(w, beta[dst]);
                v = c.add(v, t);
            }
            table.insert(sym, v);
        }
        if let Some(fb) = a.fallback_of(q) {
            for (&sym, &val) in &tables[fb.dst] {
                if a.has_symbol(q, sym) {
                    continue;
                }
                copies += 1;
                let inherited = if weighted { c.mul(fb.weight, val) } else { val };
                table.insert(sym, inherited);
            }
        }
        let mut v = a.final_weight(q);
        for &val in table.values() {
            v = c.add(v, val);
        }
        beta[q] = v;
        tables[q] = table;
    }
    let z = initial_combination(a, &beta, &mut c);

    let mut report = report_base(AlgorithmKind::Memo, z);
    report.order = Some(order);
    report.compatible = Some(state_order.compatible);
    report.oplus = c.oplus;
    report.otimes = c.otimes;
    report.copies = copies;
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

/// Backward sweep for ring weights. Instead of copying inherited entries, a
/// state takes its fallback target's whole-alphabet sum and subtracts the
/// part for symbols it overrides. Per-symbol suffix sums are evaluated on
/// demand through the fallback chain and memoized.
pub fn ring_backward<W: Ring>(a: &Automaton<W>) -> Result<PathsumRun<W>, PathsumError> {
    let state_order = build_order(a, OrderKind::Kahn)?;
    let n = a.n_states();
    let weighted = a.weighted_fallbacks();
    let mut c = OpCounters::default();
    let mut beta = vec![W::zero(); n];
    // Per state: suffix sum over its whole inherited alphabet.
    let mut full = vec![W::zero(); n];
    let mut memo: Vec<BTreeMap<SymbolId, W>> = vec![BTreeMap::new(); n];
    let mut calls = 0u64;
    for &q in &state_order.order {
        let own: Vec<SymbolId> = a.out_symbols(q).collect();
        let mut local = W::zero();
        for &sym in &own {
            let t = beta_qa(a, q, sym, weighted, &beta, &mut memo, &mut calls, &mut c);
            local = c.add(local, t);
        }
        full[q] = match a.fallback_of(q) {
            None => local,
            Some(fb) => {
                let mut overridden = W::zero();
                for &sym in &own {
                    let t = beta_qa(
                        a, fb.dst, sym, weighted, &beta, &mut memo, &mut calls, &mut c,
                    );
                    overridden = c.add(overridden, t);
                }
                let inherited = c.sub(full[fb.dst], overridden);
                let scaled = if weighted {
                    c.mul(fb.weight, inherited)
                } else {
                    inherited
                };
                c.add(local, scaled)
            }
        };
        beta[q] = c.add(a.final_weight(q), full[q]);
    }
    let z = initial_combination(a, &beta, &mut c);

    let mut report = report_base(AlgorithmKind::Ring, z);
    report.order = Some(OrderKind::Kahn);
    report.compatible = Some(state_order.compatible);
    report.oplus = c.oplus;
    report.otimes = c.otimes;
    report.beta_qa = calls;
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

/// Suffix sum of `q` restricted to paths leaving on `sym`, resolving through
/// the fallback chain when `q` has no such arc. Every evaluation, memoized
/// or not, counts toward `calls`.
#[allow(clippy::too_many_arguments)]
fn beta_qa<W: Semiring>(
    a: &Automaton<W>,
    q: StateId,
    sym: SymbolId,
    weighted: bool,
    beta: &[W],
    memo: &mut [BTreeMap<SymbolId, W>],
    calls: &mut u64,
    c: &mut OpCounters,
) -> W {
    *calls += 1;
    if let Some(&v) = memo[q].get(&sym) {
        return v;
    }
    let v = if a.has_symbol(q, sym) {
        let mut acc = W::zero();
        for &(dst, w) in a.arcs_for(q, sym) {
            let t = c.mul(w, beta[dst]);
            acc = c.add(acc, t);
        }
        acc
    } else if let Some(fb) = a.fallback_of(q) {
        let inner = beta_qa(a, fb.dst, sym, weighted, beta, memo, calls, c);
        if weighted {
            c.mul(fb.weight, inner)
        } else {
            inner
        }
    } else {
        W::zero()
    };
    memo[q].insert(sym, v);
    v
}
