//! Command-line workflow: validate, stats, partition, solve, compare and
//! generate.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bcflow_core::{
    compute_blocks, compute_stats, generate_network, parse_network, partition_with_max_size, solve_hierarchical,
    solve_monolithic, validate_network, DocumentError, GenerateError, Network, NetworkDocument, PartitionError,
    PartitionSet, SizedPartition, Solution, SolutionDocument, SolveError, SolveReport, SolverOptions, StatsReport,
    TreeFlowError,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "bcflow", version, about = "Steady-state network flow by block-cut tree decomposition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the structural and physical assumptions of a network.
    Validate { input: PathBuf },
    /// Block-cut tree statistics.
    Stats {
        input: PathBuf,
        /// Refine only until every block has at most this many junctions.
        #[arg(long)]
        max_block_size: Option<usize>,
        #[arg(long)]
        json: bool,
        /// Include per-block sizes, cut vertices and tree flows.
        #[arg(long)]
        verbose: bool,
        /// Write the JSON report here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the partition (blocks and cut vertices) as JSON.
    Partition {
        input: PathBuf,
        #[arg(long)]
        max_block_size: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solve for potentials and flows.
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Hierarchical)]
        method: Method,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the solution document here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solve with both methods and compare.
    Compare {
        input: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        json: bool,
    },
    /// Write a seeded random pipe network.
    Generate {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 0)]
        cycles: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Hierarchical,
    Monolithic,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Cap on block size for the hierarchical method (full block
    /// decomposition when absent).
    #[arg(long)]
    pub max_block_size: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    /// Solve the blocks of a level in parallel.
    #[arg(long)]
    pub parallel: bool,
}

impl SolverArgs {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            parallel: self.parallel,
            ..SolverOptions::default()
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: DocumentError,
    },
    #[error("invalid network:\n{0}")]
    Invalid(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error("both methods failed:\n  hierarchical: {hierarchical}\n  monolithic: {monolithic}")]
    BothFailed {
        hierarchical: Box<SolveError>,
        monolithic: Box<SolveError>,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => 4,
            CliError::Invalid(_) => 2,
            CliError::Solve(e) => solve_exit_code(e),
            CliError::BothFailed { hierarchical, monolithic } => {
                solve_exit_code(hierarchical).max(solve_exit_code(monolithic))
            }
            CliError::Partition(PartitionError::Disconnected { .. }) => 2,
            CliError::Io { .. } | CliError::Partition(_) | CliError::Generate(_) => 1,
        }
    }
}

fn solve_exit_code(e: &SolveError) -> i32 {
    match e.root_cause() {
        SolveError::InvalidNetwork(_) | SolveError::TreeFlow(TreeFlowError::SlacksSpanBlocks { .. } | TreeFlowError::NoSlack) => 2,
        SolveError::NonConvergence { .. } | SolveError::SingularJacobian { .. } => 3,
        _ => 1,
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Read and parse a network document; the name defaults to the file stem.
pub fn load_network(path: &Path) -> Result<(Network, String), CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let (net, name) = parse_network(&text).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })?;
    let name = name.unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    Ok((net, name))
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text).map_err(io_err(path)),
        None => out.write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>"))),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Full block decomposition, or a size-capped partition plus the size of
/// the non-separable block that kept it over the cap.
pub fn choose_partition(net: &Network, max_block_size: Option<usize>) -> Result<(PartitionSet, Option<usize>), CliError> {
    match max_block_size {
        None => Ok((compute_blocks(net)?, None)),
        Some(n) => match partition_with_max_size(net, n)? {
            SizedPartition::Fits(p) => Ok((p, None)),
            SizedPartition::Oversized(o) => Ok((o.partition, Some(o.size))),
        },
    }
}

pub fn stats_report(net: &Network, name: &str, max_block_size: Option<usize>, verbose: bool) -> Result<StatsReport, CliError> {
    let (p, oversized) = choose_partition(net, max_block_size)?;
    Ok(compute_stats(net, name, &p, oversized, verbose)?)
}

pub fn render_stats_table(s: &StatsReport) -> String {
    let mut t = String::new();
    let depth = s.tree_depth.map_or("-".to_string(), |d| d.to_string());
    let _ = writeln!(
        t,
        "{:<16} {:>9} {:>7} {:>7} {:>13} {:>16} {:>6} {:>6}",
        "network", "junctions", "edges", "blocks", "2-node blocks", "max block", "cuts", "depth"
    );
    let _ = writeln!(
        t,
        "{:<16} {:>9} {:>7} {:>7} {:>13} {:>16} {:>6} {:>6}",
        s.name,
        s.junctions,
        s.edges,
        s.blocks,
        s.two_node_blocks,
        format!("{} ({:.1}%)", s.max_block_size, s.max_block_percent),
        s.cut_vertices,
        depth
    );
    if let Some(size) = s.oversized_block {
        let _ = writeln!(t, "note: a non-separable block of {size} junctions exceeds the size cap");
    }
    if let Some(d) = &s.detail {
        let _ = writeln!(t, "\nblocks:");
        for b in &d.blocks {
            let _ = writeln!(t, "  B{:<5} {:>6} junctions {:>6} edges  cuts [{}]", b.block, b.junctions, b.edges, b.cuts.join(", "));
        }
        let _ = writeln!(t, "\ntree edges (flow cut -> block):");
        for e in &d.tree_edges {
            let flow = e.flow.map_or("-".to_string(), |f| format!("{f:.6e}"));
            let _ = writeln!(t, "  {:<12} -> B{:<5} {flow}", e.cut, e.block);
        }
    }
    t
}

#[derive(Debug, Serialize)]
struct BlockDoc {
    block: usize,
    junctions: Vec<String>,
    edges: Vec<String>,
}

#[derive(Debug, Serialize)]
struct PartitionDoc {
    blocks: Vec<BlockDoc>,
    cuts: Vec<String>,
    oversized_block: Option<usize>,
}

/// Solve with the chosen method.
pub fn solve_with(
    net: &Network,
    method: Method,
    args: &SolverArgs,
) -> Result<(Solution, SolveReport), CliError> {
    let opts = args.options();
    match method {
        Method::Monolithic => Ok(solve_monolithic(net, &opts)?),
        Method::Hierarchical => {
            let (p, oversized) = choose_partition(net, args.max_block_size)?;
            if let Some(size) = oversized {
                eprintln!("warning: a non-separable block of {size} junctions exceeds the size cap");
            }
            Ok(solve_hierarchical(net, &p, &opts)?)
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MethodOutcome {
    pub method: String,
    pub converged: bool,
    pub iterations: Option<usize>,
    pub residual_inf_norm: Option<f64>,
    pub seconds: f64,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Comparison {
    pub methods: Vec<MethodOutcome>,
    /// Largest `|a - b| / (1 + |b|)` over potentials and flows, when both
    /// methods converged (monolithic as reference).
    pub max_relative_difference: Option<f64>,
}

fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / (1.0 + y.abs()))
        .fold(0.0, f64::max)
}

pub fn compare(net: &Network, args: &SolverArgs) -> Result<Comparison, CliError> {
    let report = validate_network(net);
    if !report.is_valid() {
        return Err(CliError::Invalid(report.render(net)));
    }
    let mut outcomes = Vec::new();
    let mut results = Vec::new();
    for method in [Method::Hierarchical, Method::Monolithic] {
        let started = Instant::now();
        let result = solve_with(net, method, args);
        let seconds = started.elapsed().as_secs_f64();
        let name = match method {
            Method::Hierarchical => "hierarchical",
            Method::Monolithic => "monolithic",
        };
        outcomes.push(match &result {
            Ok((sol, report)) => MethodOutcome {
                method: name.into(),
                converged: report.passed,
                iterations: Some(sol.iterations_total),
                residual_inf_norm: Some(sol.residual_inf_norm),
                seconds,
                error: None,
            },
            Err(e) => MethodOutcome {
                method: name.into(),
                converged: false,
                iterations: None,
                residual_inf_norm: None,
                seconds,
                error: Some(e.to_string()),
            },
        });
        results.push(result);
    }
    let mono = results.pop().expect("two results");
    let hier = results.pop().expect("two results");
    let max_relative_difference = match (&hier, &mono) {
        (Ok((h, _)), Ok((m, _))) => Some(max_rel_diff(&h.potentials, &m.potentials).max(max_rel_diff(&h.flows, &m.flows))),
        _ => None,
    };
    if let (Err(CliError::Solve(h)), Err(CliError::Solve(m))) = (hier, mono) {
        return Err(CliError::BothFailed {
            hierarchical: Box::new(h),
            monolithic: Box::new(m),
        });
    }
    Ok(Comparison {
        methods: outcomes,
        max_relative_difference,
    })
}

pub fn render_comparison(c: &Comparison) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "{:<13} {:<10} {:>10} {:>14} {:>12}", "method", "status", "iterations", "residual", "seconds");
    for m in &c.methods {
        let status = if m.converged { "converged" } else { "FAILED" };
        let iters = m.iterations.map_or("-".to_string(), |i| i.to_string());
        let res = m.residual_inf_norm.map_or("-".to_string(), |r| format!("{r:.3e}"));
        let _ = writeln!(t, "{:<13} {:<10} {:>10} {:>14} {:>12.6}", m.method, status, iters, res, m.seconds);
        if let Some(e) = &m.error {
            let _ = writeln!(t, "  {}: {e}", m.method);
        }
    }
    match c.max_relative_difference {
        Some(d) => {
            let _ = writeln!(t, "max relative difference: {d:.3e}");
        }
        None => {
            let _ = writeln!(t, "max relative difference: n/a");
        }
    }
    t
}

/// Run one command, writing primary output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { input } => {
            let (net, _) = load_network(&input)?;
            let report = validate_network(&net);
            if report.is_valid() {
                emit("valid\n", None, out)
            } else {
                Err(CliError::Invalid(report.render(&net)))
            }
        }
        Command::Stats {
            input,
            max_block_size,
            json,
            verbose,
            output,
        } => {
            let (net, name) = load_network(&input)?;
            let report = stats_report(&net, &name, max_block_size, verbose)?;
            if let Some(path) = &output {
                emit(&to_json(&report), Some(path), out)?;
            }
            if json {
                emit(&to_json(&report), None, out)
            } else {
                emit(&render_stats_table(&report), None, out)
            }
        }
        Command::Partition {
            input,
            max_block_size,
            output,
        } => {
            let (net, _) = load_network(&input)?;
            let (p, oversized) = choose_partition(&net, max_block_size)?;
            let doc = PartitionDoc {
                blocks: p
                    .blocks
                    .iter()
                    .enumerate()
                    .map(|(b, block)| BlockDoc {
                        block: b,
                        junctions: block.vertices.iter().map(|&j| net.junction(j).id.clone()).collect(),
                        edges: block.edges.iter().map(|&e| net.edge(e).id.clone()).collect(),
                    })
                    .collect(),
                cuts: p.cuts.iter().map(|&c| net.junction(c).id.clone()).collect(),
                oversized_block: oversized,
            };
            emit(&to_json(&doc), output.as_deref(), out)
        }
        Command::Solve {
            input,
            method,
            solver,
            output,
        } => {
            let (net, _) = load_network(&input)?;
            let (sol, report) = solve_with(&net, method, &solver)?;
            eprintln!(
                "{}: {} iterations, residual {:.3e}, {:.3} s",
                report.method, sol.iterations_total, sol.residual_inf_norm, report.timings.total
            );
            let doc = SolutionDocument::new(&net, &sol, Some(report));
            emit(&doc.to_json(), output.as_deref(), out)
        }
        Command::Compare { input, solver, json } => {
            let (net, _) = load_network(&input)?;
            let c = compare(&net, &solver)?;
            if json {
                emit(&to_json(&c), None, out)
            } else {
                emit(&render_comparison(&c), None, out)
            }
        }
        Command::Generate {
            nodes,
            cycles,
            seed,
            output,
        } => {
            let net = generate_network(nodes, cycles, seed)?;
            let name = format!("generated-n{nodes}-k{cycles}-s{seed}");
            let doc = NetworkDocument::from_network(&net, Some(&name));
            emit(&doc.to_json(), output.as_deref(), out)
        }
    }
}
