//! Level-by-level solve over the block-cut tree, and the whole-network
//! Newton baseline.

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::network::{Edge, JunctionIdx, JunctionKind, Network, Scales, Solution};
use crate::partition::{BlockId, PartitionSet};
use crate::solver::{solve_block_newton, solve_two_node_block, BlockProblem, SolveError, SolverOptions};
use crate::tree::{build_block_cut_tree, BlockCutTree, TreeIdx, TreeVertex};
use crate::tree_flow::{agglomerate_injections, slack_block, solve_tree_flows, TreeFlows};
use crate::validate::validate_network;
use crate::verify::verify_solution;

/// Order in which blocks are solved.
///
/// `levels[0]` holds the blocks that see a slack junction directly. Each
/// later level holds the unscheduled blocks touching a cut of
/// `cut_waves[m - 1]`, the cuts whose potentials level `m - 1` settles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelSchedule {
    pub levels: Vec<Vec<BlockId>>,
    pub cut_waves: Vec<Vec<JunctionIdx>>,
    /// Tree vertices holding slack junctions.
    pub roots: Vec<TreeIdx>,
    /// Level of each block.
    pub block_level: Vec<usize>,
}

impl LevelSchedule {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

/// Breadth-first waves from the slack vertices of the tree. A block at
/// tree distance `d` from the nearest root lands on level `d / 2`.
pub fn level_schedule(tree: &BlockCutTree, net: &Network, p: &PartitionSet) -> Result<LevelSchedule, SolveError> {
    slack_block(net, p)?;
    let mut roots: Vec<TreeIdx> = net
        .slack_junctions()
        .map(|s| tree.cut_vertex(s).unwrap_or_else(|| tree.block_vertex(p.blocks_containing(s)[0])))
        .collect();
    roots.sort_unstable();
    roots.dedup();
    let dist = tree.distances_from(&roots);

    let mut levels: Vec<Vec<BlockId>> = Vec::new();
    let mut cut_waves: Vec<Vec<JunctionIdx>> = Vec::new();
    let mut block_level = vec![0; tree.num_blocks()];
    for (t, v) in tree.vertices().iter().enumerate() {
        let d = dist[t].expect("the tree is connected");
        match *v {
            TreeVertex::Block(b) => {
                let level = d / 2;
                block_level[b] = level;
                if levels.len() <= level {
                    levels.resize(level + 1, Vec::new());
                }
                levels[level].push(b);
            }
            TreeVertex::Cut(c) if d > 0 => {
                let wave = (d - 1) / 2;
                if cut_waves.len() <= wave {
                    cut_waves.resize(wave + 1, Vec::new());
                }
                cut_waves[wave].push(c);
            }
            TreeVertex::Cut(_) => {}
        }
    }
    Ok(LevelSchedule {
        levels,
        cut_waves,
        roots,
        block_level,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockMethod {
    ClosedForm,
    Newton,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockReport {
    pub block: BlockId,
    pub level: usize,
    pub junctions: usize,
    pub edges: usize,
    pub method: BlockMethod,
    pub iterations: usize,
    pub scaled_residual: f64,
    pub seconds: f64,
}

/// Flow on the tie edge from a cut into its replica in `block`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TieFlow {
    pub cut: String,
    pub block: BlockId,
    /// `None` between a slack cut and the slack block.
    pub flow: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PhaseTimings {
    pub setup: f64,
    pub tree_flows: f64,
    pub blocks: f64,
    pub verify: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub method: String,
    pub levels: Vec<Vec<BlockId>>,
    pub blocks: Vec<BlockReport>,
    pub tie_flows: Vec<TieFlow>,
    pub timings: PhaseTimings,
    pub iterations_total: usize,
    pub residual_inf_norm: f64,
    pub scaled_residual_inf_norm: f64,
    pub passed: bool,
}

fn check_valid(net: &Network, opts: &SolverOptions) -> Result<(), SolveError> {
    opts.check()?;
    let report = validate_network(net);
    if report.is_valid() {
        Ok(())
    } else {
        Err(SolveError::InvalidNetwork(report))
    }
}

fn finish(net: &Network, mut sol: Solution, tol: f64) -> Result<(Solution, bool), SolveError> {
    let v = verify_solution(net, &sol, tol)?;
    sol.residual_inf_norm = v.inf_norm;
    sol.scaled_residual_inf_norm = v.scaled_inf_norm;
    Ok((sol, v.passed))
}

fn seconds(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

/// Newton on the whole network as a single block.
pub fn solve_monolithic(net: &Network, opts: &SolverOptions) -> Result<(Solution, SolveReport), SolveError> {
    let start = Instant::now();
    check_valid(net, opts)?;
    let setup = seconds(start);
    let t = Instant::now();
    let sol = solve_block_newton(&BlockProblem::new(net.clone(), *opts))?;
    let block_seconds = seconds(t);
    let t = Instant::now();
    let (sol, passed) = finish(net, sol, opts.tol)?;
    let verify = seconds(t);
    let report = SolveReport {
        method: "monolithic".into(),
        levels: vec![vec![0]],
        blocks: vec![BlockReport {
            block: 0,
            level: 0,
            junctions: net.num_junctions(),
            edges: net.num_edges(),
            method: BlockMethod::Newton,
            iterations: sol.iterations_total,
            scaled_residual: sol.scaled_residual_inf_norm,
            seconds: block_seconds,
        }],
        tie_flows: Vec::new(),
        timings: PhaseTimings {
            setup,
            tree_flows: 0.0,
            blocks: block_seconds,
            verify,
            total: seconds(start),
        },
        iterations_total: sol.iterations_total,
        residual_inf_norm: sol.residual_inf_norm,
        scaled_residual_inf_norm: sol.scaled_residual_inf_norm,
        passed,
    };
    Ok((sol, report))
}

/// Subnetwork of block `b` with boundary data folded in: cuts whose
/// potential is known become slacks, the others carry the tree flow into
/// the block as a negative injection.
fn block_problem(
    net: &Network,
    p: &PartitionSet,
    tree: &BlockCutTree,
    flows: &TreeFlows,
    known: &[Option<f64>],
    b: BlockId,
    opts: &SolverOptions,
    scales: Scales,
) -> Result<BlockProblem, SolveError> {
    let block = &p.blocks[b];
    let local = |j: JunctionIdx| block.vertices.binary_search(&j).expect("edge endpoint lies in its block");
    let mut junctions = Vec::with_capacity(block.vertices.len());
    for &j in &block.vertices {
        let mut junction = net.junction(j).clone();
        if p.cuts.contains(&j) && !junction.is_slack() {
            junction.kind = match known[j] {
                Some(potential) => JunctionKind::Slack { potential },
                None => {
                    let into = flows.into_block(tree, b, j).ok_or_else(|| {
                        SolveError::InconsistentBlock(format!("no tree flow from cut `{}` into block {b}", junction.id))
                    })?;
                    JunctionKind::NonSlack { injection: -into }
                }
            };
        }
        junctions.push(junction);
    }
    let edges = block
        .edges
        .iter()
        .map(|&e| {
            let edge = net.edge(e);
            Edge {
                id: edge.id.clone(),
                from: local(edge.from),
                to: local(edge.to),
                element: edge.element,
            }
        })
        .collect();
    let network = Network::from_indexed(junctions, edges)
        .map_err(|e| SolveError::InconsistentBlock(format!("block {b}: {e}")))?;
    Ok(BlockProblem {
        network,
        options: *opts,
        scales: Some(scales),
    })
}

fn solve_one(prob: &BlockProblem) -> Result<(Solution, BlockMethod), SolveError> {
    let net = &prob.network;
    let slacks = net.slack_junctions().count();
    if net.num_junctions() == 2 && net.num_edges() == 1 && slacks == 1 {
        Ok((solve_two_node_block(prob)?, BlockMethod::ClosedForm))
    } else {
        Ok((solve_block_newton(prob)?, BlockMethod::Newton))
    }
}

/// Solve the blocks of `p` level by level and assemble the global
/// solution. Blocks are solved with the network's global scales so that
/// block tolerances and the global tolerance mean the same thing.
pub fn solve_hierarchical(
    net: &Network,
    p: &PartitionSet,
    opts: &SolverOptions,
) -> Result<(Solution, SolveReport), SolveError> {
    let start = Instant::now();
    check_valid(net, opts)?;
    let tree = build_block_cut_tree(net, p)?;
    let schedule = level_schedule(&tree, net, p)?;
    let setup = seconds(start);

    let t = Instant::now();
    let tree_flows = solve_tree_flows(&agglomerate_injections(&tree, net, p)?);
    let tree_seconds = seconds(t);

    let t = Instant::now();
    let scales = net.natural_scales();
    let mut known: Vec<Option<f64>> = net.junctions().iter().map(|j| j.slack_potential()).collect();
    let mut potentials = vec![f64::NAN; net.num_junctions()];
    let mut flows = vec![f64::NAN; net.num_edges()];
    let mut block_reports = Vec::with_capacity(p.blocks.len());
    for (level, blocks) in schedule.levels.iter().enumerate() {
        let run = |&b: &BlockId| -> Result<(Solution, BlockReport), SolveError> {
            let annotate = |e: SolveError| SolveError::Block {
                block: b,
                level,
                source: Box::new(e),
            };
            let started = Instant::now();
            let prob = block_problem(net, p, &tree, &tree_flows, &known, b, opts, scales).map_err(annotate)?;
            let (sol, method) = solve_one(&prob).map_err(annotate)?;
            let report = BlockReport {
                block: b,
                level,
                junctions: prob.network.num_junctions(),
                edges: prob.network.num_edges(),
                method,
                iterations: sol.iterations_total,
                scaled_residual: sol.scaled_residual_inf_norm,
                seconds: seconds(started),
            };
            Ok((sol, report))
        };
        let results: Vec<Result<(Solution, BlockReport), SolveError>> = if opts.parallel {
            blocks.par_iter().map(run).collect()
        } else {
            blocks.iter().map(run).collect()
        };
        for (&b, result) in blocks.iter().zip(results) {
            let (sol, report) = result?;
            let block = &p.blocks[b];
            for (k, &j) in block.vertices.iter().enumerate() {
                if known[j].is_none() {
                    potentials[j] = sol.potentials[k];
                    if p.cuts.contains(&j) {
                        known[j] = Some(sol.potentials[k]);
                    }
                } else if potentials[j].is_nan() {
                    potentials[j] = known[j].expect("checked above");
                }
            }
            for (k, &e) in block.edges.iter().enumerate() {
                flows[e] = sol.flows[k];
            }
            block_reports.push(report);
        }
    }
    let block_seconds = seconds(t);

    let t = Instant::now();
    let iterations_total = block_reports.iter().map(|r| r.iterations).sum();
    let sol = Solution {
        potentials,
        flows,
        residual_inf_norm: f64::NAN,
        scaled_residual_inf_norm: f64::NAN,
        iterations_total,
    };
    let (sol, passed) = finish(net, sol, opts.tol)?;
    let verify = seconds(t);

    let mut tie_flows = Vec::new();
    for &c in &p.cuts {
        for b in p.blocks_containing(c) {
            tie_flows.push(TieFlow {
                cut: net.junction(c).id.clone(),
                block: b,
                flow: tree_flows.into_block(&tree, b, c),
            });
        }
    }
    let report = SolveReport {
        method: "hierarchical".into(),
        levels: schedule.levels,
        blocks: block_reports,
        tie_flows,
        timings: PhaseTimings {
            setup,
            tree_flows: tree_seconds,
            blocks: block_seconds,
            verify,
            total: seconds(start),
        },
        iterations_total,
        residual_inf_norm: sol.residual_inf_norm,
        scaled_residual_inf_norm: sol.scaled_residual_inf_norm,
        passed,
    };
    Ok((sol, report))
}

/// Cuts that a level needs as slack data, for structural checks of a
/// schedule: every cut of a level-`m` block other than those settled by
/// that same level.
pub fn required_cuts(p: &PartitionSet, schedule: &LevelSchedule, level: usize) -> BTreeSet<JunctionIdx> {
    let settled_here: BTreeSet<JunctionIdx> = schedule.cut_waves.get(level).into_iter().flatten().copied().collect();
    schedule.levels[level]
        .iter()
        .flat_map(|&b| p.blocks[b].vertices.iter().copied())
        .filter(|j| p.cuts.contains(j) && !settled_here.contains(j))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Element, Junction};
    use crate::partition::{compute_blocks, partition_with_max_size, SizedPartition};
    use crate::testutil::four_around_center;
    use crate::tree_flow::TreeFlowError;

    fn series() -> Network {
        Network::new(
            vec![Junction::slack("a", 100.0), Junction::non_slack("b", 0.0), Junction::non_slack("c", 2.0)],
            vec![
                ("ab".into(), "a".into(), "b".into(), Element::Pipe { alpha: 1.0 }),
                ("bc".into(), "b".into(), "c".into(), Element::Pipe { alpha: 1.0 }),
            ],
        )
        .unwrap()
    }

    fn with_demands(net: &Network, slack: usize, demand: f64) -> Network {
        let kinds: Vec<(usize, JunctionKind)> = (0..net.num_junctions())
            .map(|j| {
                let kind = if j == slack {
                    JunctionKind::Slack { potential: 100.0 }
                } else {
                    JunctionKind::NonSlack {
                        injection: demand * (1 + j % 3) as f64,
                    }
                };
                (j, kind)
            })
            .collect();
        net.with_junction_kinds(&kinds)
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-6 * (1.0 + y.abs()))
    }

    #[test]
    fn series_split_is_closed_form() {
        let net = series();
        let p = compute_blocks(&net).unwrap();
        let (sol, report) = solve_hierarchical(&net, &p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.potentials, vec![100.0, 96.0, 92.0]);
        assert_eq!(sol.flows, vec![2.0, 2.0]);
        assert_eq!(sol.iterations_total, 0);
        assert!(report.blocks.iter().all(|b| b.method == BlockMethod::ClosedForm));
        assert!(report.passed);
    }

    #[test]
    fn trivial_partition_matches_monolithic() {
        let net = with_demands(&four_around_center(), 1, 0.5);
        let opts = SolverOptions::default();
        let (h, _) = solve_hierarchical(&net, &PartitionSet::trivial(&net), &opts).unwrap();
        let (m, _) = solve_monolithic(&net, &opts).unwrap();
        assert_eq!(h.potentials, m.potentials);
        assert_eq!(h.flows, m.flows);
    }

    #[test]
    fn block_decomposition_matches_monolithic() {
        let net = with_demands(&four_around_center(), 3, 0.5);
        let opts = SolverOptions::default();
        let (h, report) = solve_hierarchical(&net, &compute_blocks(&net).unwrap(), &opts).unwrap();
        let (m, _) = solve_monolithic(&net, &opts).unwrap();
        assert!(close(&h.potentials, &m.potentials) && close(&h.flows, &m.flows));
        assert!(report.passed);
    }

    #[test]
    fn slack_on_cut_vertex() {
        // v0 is the center cut of four_around_center
        let net = with_demands(&four_around_center(), 0, 1.0);
        let p = compute_blocks(&net).unwrap();
        let tree = build_block_cut_tree(&net, &p).unwrap();
        let schedule = level_schedule(&tree, &net, &p).unwrap();
        assert_eq!(schedule.levels[0].len(), p.blocks_containing(0).len());
        let (h, _) = solve_hierarchical(&net, &p, &SolverOptions::default()).unwrap();
        let (m, _) = solve_monolithic(&net, &SolverOptions::default()).unwrap();
        assert!(close(&h.potentials, &m.potentials) && close(&h.flows, &m.flows));
    }

    #[test]
    fn chain_schedule() {
        let net = crate::testutil::topo(4, &[(0, 1), (1, 2), (2, 3)]);
        let net = with_demands(&net, 0, 1.0);
        let p = compute_blocks(&net).unwrap();
        let tree = build_block_cut_tree(&net, &p).unwrap();
        let s = level_schedule(&tree, &net, &p).unwrap();
        assert_eq!(s.levels.len(), 3);
        assert!(s.levels.iter().all(|l| l.len() == 1));
        assert_eq!(s.cut_waves, vec![vec![1], vec![2]]);
        for level in 0..s.depth() {
            // slack data needed at a level is settled by earlier levels
            let earlier: BTreeSet<JunctionIdx> = s.cut_waves[..level].iter().flatten().copied().collect();
            assert!(required_cuts(&p, &s, level).is_subset(&earlier));
        }
    }

    #[test]
    fn slacks_in_two_blocks_are_rejected() {
        let mut net = series();
        net = net.with_junction_kinds(&[(2, JunctionKind::Slack { potential: 90.0 })]);
        let p = compute_blocks(&net).unwrap();
        let err = solve_hierarchical(&net, &p, &SolverOptions::default()).unwrap_err();
        assert!(matches!(err, SolveError::TreeFlow(TreeFlowError::SlacksSpanBlocks { .. })));
        // the trivial partition has a single block, so it is fine
        assert!(solve_hierarchical(&net, &PartitionSet::trivial(&net), &SolverOptions::default()).is_ok());
    }

    #[test]
    fn size_capped_partition() {
        let net = with_demands(&four_around_center(), 5, 0.25);
        let p = match partition_with_max_size(&net, 5).unwrap() {
            SizedPartition::Fits(p) => p,
            SizedPartition::Oversized(o) => o.partition,
        };
        let (h, _) = solve_hierarchical(&net, &p, &SolverOptions::default()).unwrap();
        let (m, _) = solve_monolithic(&net, &SolverOptions::default()).unwrap();
        assert!(close(&h.potentials, &m.potentials) && close(&h.flows, &m.flows));
    }

    #[test]
    fn parallel_matches_serial() {
        let net = with_demands(&four_around_center(), 3, 0.5);
        let p = compute_blocks(&net).unwrap();
        let serial = solve_hierarchical(&net, &p, &SolverOptions::default()).unwrap().0;
        let opts = SolverOptions {
            parallel: true,
            ..Default::default()
        };
        assert_eq!(solve_hierarchical(&net, &p, &opts).unwrap().0, serial);
    }
}
