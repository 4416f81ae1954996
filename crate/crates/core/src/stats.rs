//! Summary statistics of a partition and its block-cut tree.

use serde::Serialize;

use crate::hierarchical::level_schedule;
use crate::network::Network;
use crate::partition::{BlockId, PartitionError, PartitionSet};
use crate::tree::{build_block_cut_tree, TreeVertex};
use crate::tree_flow::{agglomerate_injections, solve_tree_flows};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockSummary {
    pub block: BlockId,
    pub junctions: usize,
    pub edges: usize,
    /// Cut vertices of the block, by id.
    pub cuts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeEdgeSummary {
    pub block: BlockId,
    pub cut: String,
    /// Tree flow from the cut into the block, when slack data settles it.
    pub flow: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsDetail {
    pub blocks: Vec<BlockSummary>,
    pub cuts: Vec<String>,
    pub tree_edges: Vec<TreeEdgeSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub name: String,
    pub junctions: usize,
    pub edges: usize,
    pub blocks: usize,
    pub two_node_blocks: usize,
    pub max_block_size: usize,
    /// `max_block_size` as a percentage of the junction count.
    pub max_block_percent: f64,
    pub cut_vertices: usize,
    /// Number of solve levels from the slack root; `None` without a
    /// usable slack placement.
    pub tree_depth: Option<usize>,
    /// Size of a non-separable block above the requested cap, if any.
    pub oversized_block: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<StatsDetail>,
}

pub fn compute_stats(
    net: &Network,
    name: &str,
    p: &PartitionSet,
    oversized_block: Option<usize>,
    verbose: bool,
) -> Result<StatsReport, PartitionError> {
    let tree = build_block_cut_tree(net, p)?;
    let tree_depth = level_schedule(&tree, net, p).ok().map(|s| s.depth());
    let max_block_size = p.max_block_size();

    let detail = verbose.then(|| {
        let flows = agglomerate_injections(&tree, net, p)
            .ok()
            .map(|prob| solve_tree_flows(&prob));
        let id = |j: usize| net.junction(j).id.clone();
        let blocks = p
            .blocks
            .iter()
            .enumerate()
            .map(|(b, block)| BlockSummary {
                block: b,
                junctions: block.num_vertices(),
                edges: block.edges.len(),
                cuts: block.vertices.iter().filter(|v| p.cuts.contains(v)).map(|&v| id(v)).collect(),
            })
            .collect();
        let tree_edges = tree
            .edges()
            .iter()
            .enumerate()
            .map(|(k, &(bt, ct))| {
                let (TreeVertex::Block(b), TreeVertex::Cut(c)) = (tree.vertex(bt), tree.vertex(ct)) else {
                    unreachable!("tree edges join a block to a cut")
                };
                TreeEdgeSummary {
                    block: b,
                    cut: id(c),
                    flow: flows.as_ref().and_then(|f| f.flows[k]),
                }
            })
            .collect();
        StatsDetail {
            blocks,
            cuts: p.cuts.iter().map(|&c| id(c)).collect(),
            tree_edges,
        }
    });

    Ok(StatsReport {
        name: name.to_string(),
        junctions: net.num_junctions(),
        edges: net.num_edges(),
        blocks: p.blocks.len(),
        two_node_blocks: p.two_node_blocks(),
        max_block_size,
        max_block_percent: 100.0 * max_block_size as f64 / net.num_junctions() as f64,
        cut_vertices: p.cuts.len(),
        tree_depth,
        oversized_block,
        detail,
    })
}
