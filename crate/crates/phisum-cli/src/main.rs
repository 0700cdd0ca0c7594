//! Command-line interface to pathsum computation over automata with
//! fallback arcs.
//!
//! Subcommands: `pathsum` computes a total, `gen` writes instances from the
//! built-in families, `bench` sweeps instances and algorithms into CSV,
//! `expand` compiles fallback arcs away, and `stats` reports sparsity and
//! failure-forest measurements.
//!
//! Exit codes: 0 success; 1 failed run (path budget exhausted, incompatible
//! order under `--assert-compatible`, benchmark disagreement); 2 usage or
//! input parsing; 3 structural validation; 4 algorithm/semiring capability.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use phisum::aggregator::DefaultAggregator;
use phisum::automaton::expand::expand;
use phisum::automaton::forest::FailureForest;
use phisum::automaton::format::{parse_automaton, print_automaton};
use phisum::automaton::stats::SparsityStats;
use phisum::automaton::{Automaton, StateId};
use phisum::dispatch_semiring;
use phisum::generate::{braid, lattice, random_automaton, RandomParams};
use phisum::pathsum::{
    brute_force, expand_backward, general_backward, memo_backward, ring_backward, AlgorithmKind,
    GeneralOptions, PathsumError, PathsumReport, PathsumRun, DEFAULT_PATH_BUDGET,
};
use phisum::semiring::{Count, Real, Semiring, SemiringKind};
use phisum::splitting::{optimal_static_split, CopyCostModel, SplitMode};
use phisum::toposort::OrderKind;

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes, like other pipeline tools.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Pathsum(args) => cmd_pathsum(&args),
        Command::Gen(args) => cmd_gen(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Expand(args) => cmd_expand(&args),
        Command::Stats(args) => cmd_stats(&args),
    }
}

#[derive(Parser)]
#[command(
    name = "phisum",
    version,
    about = "Pathsums over automata with fallback arcs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the total weight of all paths of an automaton.
    Pathsum(PathsumArgs),
    /// Generate a seeded automaton from one of the built-in families.
    Gen(GenArgs),
    /// Sweep instances and algorithms, emitting one CSV row per run.
    Bench(BenchArgs),
    /// Compile fallback arcs away and print the expanded automaton.
    Expand(ExpandArgs),
    /// Print sparsity and failure-forest measurements.
    Stats(StatsArgs),
}

#[derive(Debug, Error)]
enum CliError {
    /// Unreadable or unparseable input, or an invalid flag combination.
    #[error("{0}")]
    Usage(String),
    /// Structurally invalid automaton.
    #[error("{0}")]
    Invalid(String),
    /// Algorithm cannot run over the chosen semiring.
    #[error("{0}")]
    Unsupported(String),
    /// The run itself failed.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Invalid(_) => 3,
            CliError::Unsupported(_) => 4,
        }
    }
}

fn lift(e: PathsumError) -> CliError {
    match e {
        PathsumError::Cycle(c) => CliError::Invalid(c.to_string()),
        PathsumError::Capability(c) => CliError::Unsupported(c.to_string()),
        e @ PathsumError::PathBudgetExceeded { .. } => CliError::Failed(e.to_string()),
    }
}

fn read_input(path: Option<&Path>) -> Result<(String, String), CliError> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            Ok((p.display().to_string(), text))
        }
        None => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| CliError::Usage(format!("<stdin>: {e}")))?;
            Ok(("<stdin>".to_string(), text))
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses and validates automaton text, tagging errors with the input name.
fn load<W: Semiring>(name: &str, text: &str) -> Result<Automaton<W>, CliError> {
    let a = parse_automaton(text).map_err(|e| CliError::Usage(format!("{name}: {e}")))?;
    a.validate()
        .map_err(|e| CliError::Invalid(format!("{name}: {e}")))?;
    Ok(a)
}

fn parse_unit(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn parse_positive(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v >= 1 {
        Ok(v)
    } else {
        Err("must be at least 1".to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Arcs, fallbacks, and weights drawn from the density knobs.
    Random,
    /// Two interleaved fallback branches forcing worst-case aggregator reuse.
    Braid,
    /// Layers of small failure trees that tree-aware orders keep cheap.
    Lattice,
}

type RingRunner<W> = fn(&Automaton<W>) -> Result<PathsumRun<W>, PathsumError>;

#[derive(Args)]
struct PathsumArgs {
    /// Automaton text file; standard input when omitted.
    #[arg(short, long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Weight algebra: boolean, tropical-min, tropical-max, real, log, count.
    #[arg(long, default_value = "real")]
    semiring: SemiringKind,
    /// Algorithm: brute, expand, memo, ring, general.
    #[arg(long, default_value = "general")]
    algorithm: AlgorithmKind,
    /// State order strategy (kahn, greedy); ignored by brute and ring.
    #[arg(long, default_value = "kahn")]
    order: OrderKind,
    /// Fail unless the state order keeps each failure tree contiguous.
    #[arg(long)]
    assert_compatible: bool,
    /// Failure-tree splitting for the general algorithm: none, dynamic,
    /// static.
    #[arg(long, default_value = "none")]
    split: SplitMode,
    /// Copy cost the dynamic trigger assumes: interned-keys, full-alphabet.
    #[arg(long, default_value = "interned-keys")]
    copy_cost: CopyCostModel,
    /// Per-write unit cost used by the split cost model.
    #[arg(long, default_value_t = 1.0)]
    split_unit_cost: f64,
    /// Print the split plan with predicted and measured costs.
    #[arg(long)]
    split_report: bool,
    /// Print the full operation-count report after the total.
    #[arg(long)]
    stats: bool,
    /// Report as JSON instead of plain lines.
    #[arg(long)]
    json: bool,
    /// Print final aggregator contents and instrumentation.
    #[arg(long)]
    dump_aggregator: bool,
    /// Most paths the brute algorithm may enumerate.
    #[arg(long, default_value_t = DEFAULT_PATH_BUDGET)]
    path_budget: u64,
}

fn cmd_pathsum(args: &PathsumArgs) -> Result<(), CliError> {
    args.algorithm
        .supports(args.semiring)
        .map_err(|e| CliError::Unsupported(e.to_string()))?;
    if args.algorithm != AlgorithmKind::General {
        if args.split != SplitMode::None {
            return Err(CliError::Usage(
                "--split applies only to the general algorithm".to_string(),
            ));
        }
        if args.split_report {
            return Err(CliError::Usage(
                "--split-report applies only to the general algorithm".to_string(),
            ));
        }
    }
    let (name, text) = read_input(args.input.as_deref())?;
    match (args.algorithm, args.semiring) {
        (AlgorithmKind::Ring, SemiringKind::Real) => {
            pathsum_run::<Real>(&name, &text, args, Some(ring_backward))
        }
        (AlgorithmKind::Ring, SemiringKind::Count) => {
            pathsum_run::<Count>(&name, &text, args, Some(ring_backward))
        }
        (AlgorithmKind::Ring, _) => unreachable!("the capability check rejects these"),
        (_, kind) => dispatch_semiring!(kind, W => pathsum_run::<W>(&name, &text, args, None)),
    }
}

fn general_options(args: &PathsumArgs) -> GeneralOptions {
    GeneralOptions {
        order: args.order,
        split: args.split,
        copy_cost: args.copy_cost,
        static_plan: None,
        split_unit_cost: args.split_unit_cost,
    }
}

fn pathsum_run<W: DefaultAggregator>(
    name: &str,
    text: &str,
    args: &PathsumArgs,
    ring: Option<RingRunner<W>>,
) -> Result<(), CliError> {
    let a: Automaton<W> = load(name, text)?;
    let run = match args.algorithm {
        AlgorithmKind::Brute => brute_force(&a, args.path_budget),
        AlgorithmKind::Expand => expand_backward(&a, args.order),
        AlgorithmKind::Memo => memo_backward(&a, args.order),
        AlgorithmKind::Ring => ring.expect("ring dispatch passes a runner")(&a),
        AlgorithmKind::General => general_backward(&a, &general_options(args)),
    }
    .map_err(lift)?;

    if args.assert_compatible {
        match run.report.compatible {
            Some(true) => {}
            Some(false) => {
                return Err(CliError::Failed(format!(
                    "the {} order interleaves failure trees",
                    args.order
                )))
            }
            None => {
                return Err(CliError::Usage(format!(
                    "--assert-compatible applies only to algorithms that order states, not {}",
                    args.algorithm
                )))
            }
        }
    }

    let split = if args.split_report {
        Some(summarize_split(&a, args, &run)?)
    } else {
        None
    };

    if args.json {
        let mut value = serde_json::to_value(&run.report).expect("reports serialize");
        if args.dump_aggregator {
            value["aggregators"] = aggregator_json(&a, &run);
        }
        if let Some(s) = &split {
            value["split"] = s.to_json();
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("JSON values print")
        );
        return Ok(());
    }

    println!("{}", run.report.z);
    if args.stats {
        print_report(&run.report);
    }
    if args.dump_aggregator {
        print_aggregators(&a, &run);
    }
    if let Some(s) = &split {
        s.print();
    }
    Ok(())
}

fn print_report(r: &PathsumReport) {
    println!("algorithm: {}", r.algorithm);
    println!("semiring: {}", r.semiring);
    println!(
        "order: {}",
        r.order.map_or("-".to_string(), |o| o.to_string())
    );
    println!(
        "compatible: {}",
        r.compatible.map_or("-".to_string(), |c| c.to_string())
    );
    println!("oplus: {}", r.oplus);
    println!("otimes: {}", r.otimes);
    println!("beta_qa: {}", r.beta_qa);
    println!("visits: {}", r.visits);
    println!("leaves: {}", r.leaves);
    println!("sets: {}", r.sets);
    println!("copies: {}", r.copies);
    println!("expanded_arcs: {}", r.expanded_arcs);
}

fn print_aggregators<W: Semiring>(a: &Automaton<W>, run: &PathsumRun<W>) {
    for (i, (dump, stats)) in run
        .aggregator_dumps
        .iter()
        .zip(&run.aggregator_stats)
        .enumerate()
    {
        println!(
            "aggregator {i}: frontier {}, value {}, keys {}",
            a.state_name(dump.frontier),
            dump.value,
            dump.entries.len()
        );
        for &(sym, v) in &dump.entries {
            println!("  {} = {}", a.symbol_name(sym), v);
        }
        println!(
            "  stats: sets {}, multiplies {}, undone {}, node_writes {}, \
             max_set_node_writes {}, rebuild_node_writes {}",
            stats.sets,
            stats.multiplies,
            stats.undone_updates,
            stats.node_writes_total,
            stats.max_set_node_writes,
            stats.rebuild_node_writes
        );
    }
}

fn aggregator_json<W: Semiring>(a: &Automaton<W>, run: &PathsumRun<W>) -> serde_json::Value {
    let items: Vec<serde_json::Value> = run
        .aggregator_dumps
        .iter()
        .zip(&run.aggregator_stats)
        .map(|(dump, stats)| {
            let entries: serde_json::Map<String, serde_json::Value> = dump
                .entries
                .iter()
                .map(|&(sym, v)| {
                    (
                        a.symbol_name(sym).to_string(),
                        serde_json::Value::String(v.to_string()),
                    )
                })
                .collect();
            serde_json::json!({
                "frontier": a.state_name(dump.frontier),
                "value": dump.value.to_string(),
                "entries": entries,
                "stats": stats,
            })
        })
        .collect();
    serde_json::Value::Array(items)
}

/// Split plan and modeled costs for one run, rendered by `--split-report`.
struct SplitSummary {
    mode: SplitMode,
    split_names: Vec<String>,
    /// Modeled net improvement, for the static planner only.
    predicted: Option<f64>,
    copy_charge: f64,
    baseline_cost: f64,
    split_cost: f64,
    trees: Vec<TreeSummary>,
}

struct TreeSummary {
    root: String,
    size: usize,
    cuts: Vec<String>,
    /// Per state: write units between it and its piece root, including its
    /// own entries.
    depths: Vec<(String, u64)>,
}

fn summarize_split<W: DefaultAggregator>(
    a: &Automaton<W>,
    args: &PathsumArgs,
    run: &PathsumRun<W>,
) -> Result<SplitSummary, CliError> {
    let forest = FailureForest::new(a).map_err(|e| CliError::Invalid(e.to_string()))?;
    let c_u = args.split_unit_cost;
    let n = a.n_states();

    let baseline = if args.split == SplitMode::None {
        None
    } else {
        let options = GeneralOptions {
            split: SplitMode::None,
            ..general_options(args)
        };
        Some(general_backward(a, &options).map_err(lift)?)
    };
    let base_run = baseline.as_ref().unwrap_or(run);

    let modeled = |r: &PathsumRun<W>, anchors: &[bool]| -> f64 {
        (0..n)
            .filter(|&q| !anchors[q])
            .map(|q| f64::from(r.visit_counts[q]) * a.out_degree(q) as f64 * c_u)
            .sum()
    };
    let mut base_anchor = vec![false; n];
    for &r in forest.roots() {
        base_anchor[r] = true;
    }
    let mut anchor = base_anchor.clone();
    for &q in &run.split_states {
        anchor[q] = true;
    }
    let baseline_cost = modeled(base_run, &base_anchor);
    let split_cost = modeled(run, &anchor);
    let copy_charge = run.copy_costs.iter().sum::<u64>() as f64;
    let predicted =
        (args.split == SplitMode::Static).then(|| optimal_static_split(a, &forest, c_u).predicted);

    let mut depth_of = vec![0u64; n];
    let mut order: Vec<StateId> = (0..n).collect();
    order.sort_by_key(|&q| forest.chain_len(q));
    for &q in &order {
        if !anchor[q] {
            let p = forest.parent(q).expect("non-anchors have parents");
            depth_of[q] = a.out_degree(q) as u64 + depth_of[p];
        }
    }

    let trees = forest
        .roots()
        .iter()
        .filter(|&&r| forest.subtree_size(r) > 1)
        .map(|&r| {
            let members: Vec<StateId> = (0..n).filter(|&q| forest.root_of(q) == r).collect();
            TreeSummary {
                root: a.state_name(r).to_string(),
                size: forest.subtree_size(r) as usize,
                cuts: members
                    .iter()
                    .filter(|&&q| anchor[q] && q != r)
                    .map(|&q| a.state_name(q).to_string())
                    .collect(),
                depths: members
                    .iter()
                    .map(|&q| (a.state_name(q).to_string(), depth_of[q]))
                    .collect(),
            }
        })
        .collect();

    Ok(SplitSummary {
        mode: args.split,
        split_names: run
            .split_states
            .iter()
            .map(|&q| a.state_name(q).to_string())
            .collect(),
        predicted,
        copy_charge,
        baseline_cost,
        split_cost,
        trees,
    })
}

impl SplitSummary {
    fn measured(&self) -> f64 {
        self.baseline_cost - self.split_cost - self.copy_charge
    }

    fn print(&self) {
        println!("split mode: {}", self.mode);
        let states = if self.split_names.is_empty() {
            "(none)".to_string()
        } else {
            self.split_names.join(" ")
        };
        println!("split states: {states}");
        if let Some(p) = self.predicted {
            println!("predicted improvement: {p}");
        }
        println!("copy charge: {}", self.copy_charge);
        println!("baseline cost: {}", self.baseline_cost);
        println!("split cost: {}", self.split_cost);
        println!("measured improvement: {}", self.measured());
        for t in &self.trees {
            let cuts = if t.cuts.is_empty() {
                "(none)".to_string()
            } else {
                t.cuts.join(" ")
            };
            println!("tree {} (size {}): cuts {}", t.root, t.size, cuts);
            for (name, d) in &t.depths {
                println!("  depth {name} = {d}");
            }
        }
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "mode": self.mode,
            "states": self.split_names,
            "predicted_improvement": self.predicted,
            "copy_charge": self.copy_charge,
            "baseline_cost": self.baseline_cost,
            "split_cost": self.split_cost,
            "measured_improvement": self.measured(),
            "trees": self.trees.iter().map(|t| {
                let depths: serde_json::Map<String, serde_json::Value> = t
                    .depths
                    .iter()
                    .map(|(name, d)| (name.clone(), serde_json::Value::from(*d)))
                    .collect();
                serde_json::json!({
                    "root": t.root,
                    "size": t.size,
                    "cuts": t.cuts,
                    "depths": depths,
                })
            }).collect::<Vec<_>>(),
        })
    }
}

#[derive(Args)]
struct GenArgs {
    /// Instance family.
    #[arg(long, value_enum, default_value_t = Family::Random)]
    family: Family,
    /// Random family seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// State count for the random family.
    #[arg(long, default_value_t = 8, value_parser = parse_positive)]
    states: usize,
    /// Alphabet size for the random family.
    #[arg(long, default_value_t = 3, value_parser = parse_positive)]
    symbols: usize,
    /// Probability that a (state, symbol) pair has outgoing arcs.
    #[arg(long, default_value_t = 0.3, value_parser = parse_unit)]
    density: f64,
    /// Probability that a state has a fallback arc.
    #[arg(long, default_value_t = 0.5, value_parser = parse_unit)]
    phi_prob: f64,
    /// Sample weights for fallback arcs instead of using one.
    #[arg(long)]
    weighted_phi: bool,
    /// Most arc destinations per (state, symbol).
    #[arg(long, default_value_t = 1, value_parser = parse_positive)]
    max_fanout: usize,
    /// Probability that a state has a nonzero initial weight.
    #[arg(long, default_value_t = 0.4, value_parser = parse_unit)]
    initial_density: f64,
    /// Probability that a state has a nonzero final weight.
    #[arg(long, default_value_t = 0.4, value_parser = parse_unit)]
    final_density: f64,
    /// Branch pair count for the braid family.
    #[arg(long, default_value_t = 3, value_parser = parse_positive)]
    k: usize,
    /// Layer count for the lattice family.
    #[arg(long, default_value_t = 3, value_parser = parse_positive)]
    layers: usize,
    /// Weight algebra to sample weights from.
    #[arg(long, default_value = "real")]
    semiring: SemiringKind,
    /// Write here instead of standard output.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

fn build_family<W: Semiring>(args: &GenArgs) -> Automaton<W> {
    match args.family {
        Family::Random => random_automaton(
            &RandomParams {
                states: args.states,
                symbols: args.symbols,
                arc_density: args.density,
                fallback_density: args.phi_prob,
                weighted_fallbacks: args.weighted_phi,
                max_fanout: args.max_fanout,
                initial_density: args.initial_density,
                final_density: args.final_density,
            },
            args.seed,
        ),
        Family::Braid => braid(args.k),
        Family::Lattice => lattice(args.layers),
    }
}

fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let text = dispatch_semiring!(args.semiring, W => {
        let a: Automaton<W> = build_family(args);
        print_automaton(&a)
    });
    write_output(args.output.as_deref(), &text)
}

#[derive(Args)]
struct BenchArgs {
    /// Instance family to sweep.
    #[arg(long, value_enum, default_value_t = Family::Random)]
    family: Family,
    /// How many consecutive seeds to run (random family).
    #[arg(long, default_value_t = 20, value_parser = parse_positive)]
    seeds: usize,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    seed_start: u64,
    /// State count for the random family.
    #[arg(long, default_value_t = 8, value_parser = parse_positive)]
    states: usize,
    /// Alphabet size for the random family.
    #[arg(long, default_value_t = 3, value_parser = parse_positive)]
    symbols: usize,
    /// Arc densities to sweep, comma separated (random family).
    #[arg(long, default_value = "0.3", value_delimiter = ',', value_parser = parse_unit)]
    densities: Vec<f64>,
    /// Probability that a state has a fallback arc.
    #[arg(long, default_value_t = 0.5, value_parser = parse_unit)]
    phi_prob: f64,
    /// Sample weights for fallback arcs instead of using one.
    #[arg(long)]
    weighted_phi: bool,
    /// Most arc destinations per (state, symbol).
    #[arg(long, default_value_t = 1, value_parser = parse_positive)]
    max_fanout: usize,
    /// Sizes to sweep for the braid and lattice families.
    #[arg(long, default_value = "3,5,8", value_delimiter = ',', value_parser = parse_positive)]
    sizes: Vec<usize>,
    /// Weight algebra.
    #[arg(long, default_value = "real")]
    semiring: SemiringKind,
    /// Algorithms to run, comma separated; inapplicable ones are skipped.
    #[arg(
        long,
        default_value = "expand,memo,ring,general",
        value_delimiter = ','
    )]
    algorithms: Vec<AlgorithmKind>,
    /// Order strategies for sweeping algorithms.
    #[arg(long, default_value = "kahn,greedy", value_delimiter = ',')]
    orders: Vec<OrderKind>,
    /// Split modes for the general algorithm.
    #[arg(long, default_value = "none,dynamic,static", value_delimiter = ',')]
    splits: Vec<SplitMode>,
    /// Skip the cross-algorithm agreement check.
    #[arg(long)]
    no_verify: bool,
    /// Most paths the brute algorithm may enumerate.
    #[arg(long, default_value_t = DEFAULT_PATH_BUDGET)]
    path_budget: u64,
}

const CSV_HEADER: [&str; 21] = [
    "seed",
    "states",
    "symbols",
    "s",
    "s_bar",
    "t_max",
    "pi_max",
    "algorithm",
    "semiring",
    "order",
    "compatible",
    "Z",
    "oplus",
    "otimes",
    "beta_qa",
    "visits",
    "leaves",
    "sets",
    "copies",
    "expanded_arcs",
    "wall_us",
];

fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let algorithms: Vec<AlgorithmKind> = args
        .algorithms
        .iter()
        .copied()
        .filter(|alg| alg.supports(args.semiring).is_ok())
        .collect();
    if algorithms.is_empty() {
        return Err(CliError::Unsupported(format!(
            "none of the requested algorithms can run over the {} semiring",
            args.semiring
        )));
    }
    match args.semiring {
        SemiringKind::Real => bench_family::<Real>(args, &algorithms, Some(ring_backward)),
        SemiringKind::Count => bench_family::<Count>(args, &algorithms, Some(ring_backward)),
        kind => dispatch_semiring!(kind, W => bench_family::<W>(args, &algorithms, None)),
    }
}

fn bench_family<W: DefaultAggregator>(
    args: &BenchArgs,
    algorithms: &[AlgorithmKind],
    ring: Option<RingRunner<W>>,
) -> Result<(), CliError> {
    let mut instances: Vec<(u64, Automaton<W>)> = Vec::new();
    match args.family {
        Family::Random => {
            for &density in &args.densities {
                let params = RandomParams {
                    states: args.states,
                    symbols: args.symbols,
                    arc_density: density,
                    fallback_density: args.phi_prob,
                    weighted_fallbacks: args.weighted_phi,
                    max_fanout: args.max_fanout,
                    ..RandomParams::default()
                };
                for seed in args.seed_start..args.seed_start + args.seeds as u64 {
                    instances.push((seed, random_automaton(&params, seed)));
                }
            }
        }
        Family::Braid => {
            for &k in &args.sizes {
                instances.push((k as u64, braid(k)));
            }
        }
        Family::Lattice => {
            for &layers in &args.sizes {
                instances.push((layers as u64, lattice(layers)));
            }
        }
    }

    let mut wtr = csv::Writer::from_writer(std::io::stdout());
    wtr.write_record(CSV_HEADER)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    for (seed, a) in &instances {
        bench_instance(&mut wtr, *seed, a, args, algorithms, ring)?;
    }
    wtr.flush().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(())
}

fn variants(alg: AlgorithmKind, args: &BenchArgs) -> Vec<(Option<OrderKind>, Option<SplitMode>)> {
    match alg {
        AlgorithmKind::Brute | AlgorithmKind::Ring => vec![(None, None)],
        AlgorithmKind::Expand | AlgorithmKind::Memo => {
            args.orders.iter().map(|&o| (Some(o), None)).collect()
        }
        AlgorithmKind::General => args
            .orders
            .iter()
            .flat_map(|&o| args.splits.iter().map(move |&s| (Some(o), Some(s))))
            .collect(),
    }
}

fn execute<W: DefaultAggregator>(
    a: &Automaton<W>,
    alg: AlgorithmKind,
    variant: (Option<OrderKind>, Option<SplitMode>),
    budget: u64,
    ring: Option<RingRunner<W>>,
) -> Result<PathsumRun<W>, PathsumError> {
    let order = variant.0.unwrap_or(OrderKind::Kahn);
    match alg {
        AlgorithmKind::Brute => brute_force(a, budget),
        AlgorithmKind::Expand => expand_backward(a, order),
        AlgorithmKind::Memo => memo_backward(a, order),
        AlgorithmKind::Ring => ring.expect("ring rows require a ring semiring")(a),
        AlgorithmKind::General => general_backward(
            a,
            &GeneralOptions {
                order,
                split: variant.1.unwrap_or(SplitMode::None),
                ..GeneralOptions::default()
            },
        ),
    }
}

fn bench_instance<W: DefaultAggregator>(
    wtr: &mut csv::Writer<std::io::Stdout>,
    seed: u64,
    a: &Automaton<W>,
    args: &BenchArgs,
    algorithms: &[AlgorithmKind],
    ring: Option<RingRunner<W>>,
) -> Result<(), CliError> {
    let stats = SparsityStats::compute(a).map_err(|e| CliError::Invalid(e.to_string()))?;
    let forest = FailureForest::new(a).map_err(|e| CliError::Invalid(e.to_string()))?;
    let t_max = forest
        .roots()
        .iter()
        .map(|&r| forest.subtree_size(r))
        .max()
        .unwrap_or(0);
    let pi_max = (0..a.n_states())
        .map(|q| forest.chain_len(q))
        .max()
        .unwrap_or(0);

    let mut reference: Option<(AlgorithmKind, W)> = None;
    for &alg in algorithms {
        for variant in variants(alg, args) {
            let start = Instant::now();
            let run = execute(a, alg, variant, args.path_budget, ring).map_err(lift)?;
            let wall_us = start.elapsed().as_micros();
            if !args.no_verify {
                match reference {
                    None => reference = Some((alg, run.z)),
                    Some((ref_alg, z0)) => {
                        if !z0.agrees(&run.z) {
                            return Err(CliError::Failed(format!(
                                "Z disagreement on seed {seed}: {ref_alg} gives {z0} but {alg} gives {}",
                                run.z
                            )));
                        }
                    }
                }
            }
            wtr.write_record([
                seed.to_string(),
                stats.n_states.to_string(),
                stats.n_symbols.to_string(),
                format!("{:.6}", stats.s),
                format!("{:.6}", stats.s_bar),
                t_max.to_string(),
                pi_max.to_string(),
                run.report.algorithm.to_string(),
                run.report.semiring.to_string(),
                run.report.order.map_or_else(String::new, |o| o.to_string()),
                run.report
                    .compatible
                    .map_or_else(String::new, |c| c.to_string()),
                run.report.z.clone(),
                run.report.oplus.to_string(),
                run.report.otimes.to_string(),
                run.report.beta_qa.to_string(),
                run.report.visits.to_string(),
                run.report.leaves.to_string(),
                run.report.sets.to_string(),
                run.report.copies.to_string(),
                run.report.expanded_arcs.to_string(),
                wall_us.to_string(),
            ])
            .map_err(|e| CliError::Usage(e.to_string()))?;
        }
    }
    Ok(())
}

#[derive(Args)]
struct ExpandArgs {
    /// Automaton text file; standard input when omitted.
    #[arg(short, long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Weight algebra the file's weights parse under.
    #[arg(long, default_value = "real")]
    semiring: SemiringKind,
    /// Write here instead of standard output.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

fn cmd_expand(args: &ExpandArgs) -> Result<(), CliError> {
    let (name, text) = read_input(args.input.as_deref())?;
    let out = dispatch_semiring!(args.semiring, W => {
        let a: Automaton<W> = load(&name, &text)?;
        let (expanded, _added) = expand(&a).map_err(|e| CliError::Invalid(e.to_string()))?;
        print_automaton(&expanded)
    });
    write_output(args.output.as_deref(), &out)
}

#[derive(Args)]
struct StatsArgs {
    /// Automaton text file; standard input when omitted.
    #[arg(short, long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Weight algebra the file's weights parse under.
    #[arg(long, default_value = "real")]
    semiring: SemiringKind,
    /// Report as JSON instead of plain lines.
    #[arg(long)]
    json: bool,
}

fn cmd_stats(args: &StatsArgs) -> Result<(), CliError> {
    let (name, text) = read_input(args.input.as_deref())?;
    dispatch_semiring!(args.semiring, W => {
        let a: Automaton<W> = load(&name, &text)?;
        let mut stats = SparsityStats::compute(&a).map_err(|e| CliError::Invalid(e.to_string()))?;
        let (expanded, _added) = expand(&a).map_err(|e| CliError::Invalid(e.to_string()))?;
        stats.n_expanded_arcs = Some(expanded.arc_count());
        let forest = FailureForest::new(&a).map_err(|e| CliError::Invalid(e.to_string()))?;
        let trees = forest.roots().len();
        let t_max = forest.roots().iter().map(|&r| forest.subtree_size(r)).max().unwrap_or(0);
        let pi_max = (0..a.n_states()).map(|q| forest.chain_len(q)).max().unwrap_or(0);
        if args.json {
            let mut value = serde_json::to_value(&stats).expect("stats serialize");
            value["trees"] = trees.into();
            value["t_max"] = t_max.into();
            value["pi_max"] = pi_max.into();
            println!("{}", serde_json::to_string_pretty(&value).expect("JSON values print"));
        } else {
            println!("states: {}", stats.n_states);
            println!("symbols: {}", stats.n_symbols);
            println!("arcs: {}", stats.n_arcs);
            println!("fallbacks: {}", stats.n_fallbacks);
            println!("out_symbols: {}", stats.out_symbols);
            println!("s: {:.6}", stats.s);
            println!("expanded_out_symbols: {}", stats.expanded_out_symbols);
            println!("s_bar: {:.6}", stats.s_bar);
            println!("expanded_arcs: {}", expanded.arc_count());
            println!("demand_total: {}", stats.demand_total);
            println!("trees: {trees}");
            println!("t_max: {t_max}");
            println!("pi_max: {pi_max}");
        }
        Ok(())
    })
}
