//! Flows on the edges of a block-cut tree from agglomerated injections.
//!
//! Tree edge flows are oriented cut -> block: a positive value is flow
//! leaving the cut vertex and entering the block. In the augmented network
//! this is exactly the flow on the tie edge `cut -> replica in block`.

use thiserror::Error;

use crate::network::{JunctionIdx, Network};
use crate::partition::{BlockId, PartitionSet};
use crate::tree::{BlockCutTree, TreeIdx, TreeVertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeFlowError {
    #[error("network has no slack junction")]
    NoSlack,
    /// No single block holds every slack junction.
    #[error("slack junctions {slacks:?} do not lie in a single block")]
    SlacksSpanBlocks { slacks: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeFlowProblem {
    pub tree: BlockCutTree,
    /// Per tree vertex; `None` where the injection is unknown (the roots).
    pub injections: Vec<Option<f64>>,
    /// Tree vertices holding slack junctions. A single root unless the
    /// slack block also has slack cut vertices.
    pub roots: Vec<TreeIdx>,
}

/// The block that contains every slack junction, if any. Among several
/// candidates (possible only when all slacks sit on one cut vertex) the
/// lowest block id wins.
pub fn slack_block(net: &Network, p: &PartitionSet) -> Result<BlockId, TreeFlowError> {
    let slacks: Vec<JunctionIdx> = net.slack_junctions().collect();
    if slacks.is_empty() {
        return Err(TreeFlowError::NoSlack);
    }
    (0..p.blocks.len())
        .find(|&b| slacks.iter().all(|&s| p.blocks[b].contains(s)))
        .ok_or_else(|| TreeFlowError::SlacksSpanBlocks {
            slacks: slacks.iter().map(|&s| net.junction(s).id.clone()).collect(),
        })
}

/// Tree vertex standing for junction `j`: its cut vertex, or the single
/// block containing it.
fn holder(tree: &BlockCutTree, p: &PartitionSet, j: JunctionIdx) -> TreeIdx {
    tree.cut_vertex(j)
        .unwrap_or_else(|| tree.block_vertex(p.blocks_containing(j)[0]))
}

/// Cut vertices carry their own injection; block vertices carry the sum
/// over their interior (non-cut) junctions. Vertices holding a slack are
/// the roots.
pub fn agglomerate_injections(
    tree: &BlockCutTree,
    net: &Network,
    p: &PartitionSet,
) -> Result<TreeFlowProblem, TreeFlowError> {
    slack_block(net, p)?;
    let mut injections: Vec<Option<f64>> = vec![Some(0.0); tree.num_vertices()];
    let mut roots = Vec::new();
    for (j, junction) in net.junctions().iter().enumerate() {
        let t = holder(tree, p, j);
        match junction.injection() {
            Some(q) => {
                if let Some(acc) = injections[t].as_mut() {
                    *acc += q;
                }
            }
            None => {
                injections[t] = None;
                if !roots.contains(&t) {
                    roots.push(t);
                }
            }
        }
    }
    roots.sort_unstable();
    Ok(TreeFlowProblem {
        tree: tree.clone(),
        injections,
        roots,
    })
}

/// Flow per tree edge (cut -> block); `None` on edges joining two roots,
/// whose flow the slack data leaves open.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeFlows {
    pub flows: Vec<Option<f64>>,
}

impl TreeFlows {
    /// Flow from cut `c` into block `b`, if determined.
    pub fn into_block(&self, tree: &BlockCutTree, b: BlockId, c: JunctionIdx) -> Option<f64> {
        let t = tree.cut_vertex(c)?;
        tree.neighbors(t)
            .iter()
            .find(|&&(w, _)| w == tree.block_vertex(b))
            .and_then(|&(_, k)| self.flows[k])
    }
}

/// Leaf peeling: repeatedly settle the single open edge of a non-root
/// vertex of degree one. Linear time; equivalent to solving the reduced
/// incidence system.
pub fn solve_tree_flows(prob: &TreeFlowProblem) -> TreeFlows {
    let tree = &prob.tree;
    let n = tree.num_vertices();
    let mut flows: Vec<Option<f64>> = vec![None; tree.edges().len()];
    let mut open_degree: Vec<usize> = (0..n).map(|t| tree.neighbors(t).len()).collect();
    let mut inflow = vec![0.0f64; n];
    let is_root = |t: TreeIdx| prob.roots.contains(&t);
    let mut queue: Vec<TreeIdx> = (0..n).filter(|&t| !is_root(t) && open_degree[t] == 1).collect();

    while let Some(v) = queue.pop() {
        if open_degree[v] != 1 {
            continue;
        }
        let &(w, k) = tree
            .neighbors(v)
            .iter()
            .find(|&&(_, k)| flows[k].is_none())
            .expect("degree-one vertex has an open edge");
        let q = prob.injections[v].expect("non-root vertices have known injections");
        let needed = q - inflow[v];
        let x = match tree.vertex(v) {
            TreeVertex::Block(_) => needed,
            TreeVertex::Cut(_) => -needed,
        };
        flows[k] = Some(x);
        inflow[v] += needed;
        match tree.vertex(w) {
            TreeVertex::Block(_) => inflow[w] += x,
            TreeVertex::Cut(_) => inflow[w] -= x,
        }
        open_degree[v] -= 1;
        open_degree[w] -= 1;
        if !is_root(w) && open_degree[w] == 1 {
            queue.push(w);
        }
    }
    TreeFlows { flows }
}
