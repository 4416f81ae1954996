//! Generalized block-cut sets: articulation points, the full block
//! decomposition, recursive refinement at a chosen articulation point and
//! size-capped partitioning.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::graph::{low_link, LocalGraph};
use crate::network::{EdgeIdx, JunctionIdx, Network};

/// Index of a block inside its [`PartitionSet`].
pub type BlockId = usize;

/// A connected subgraph given by its (sorted) vertex and edge lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub vertices: Vec<JunctionIdx>,
    pub edges: Vec<EdgeIdx>,
}

impl Block {
    /// Block spanned by `edges`; its vertices are their endpoints.
    pub fn from_edges(net: &Network, mut edges: Vec<EdgeIdx>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let vertices: BTreeSet<_> = edges
            .iter()
            .flat_map(|&e| [net.edge(e).from, net.edge(e).to])
            .collect();
        Self {
            vertices: vertices.into_iter().collect(),
            edges,
        }
    }

    pub fn contains(&self, v: JunctionIdx) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_two_node(&self) -> bool {
        self.vertices.len() == 2
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("network is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("block {0} does not exist")]
    NoSuchBlock(BlockId),
    #[error("junction #{junction} is not an articulation point of block {block}")]
    NotArticulation { block: BlockId, junction: JunctionIdx },
    #[error("max block size must be at least 2, got {0}")]
    MaxSizeTooSmall(usize),
    #[error("edge #{0} is not covered by any block")]
    EdgeUncovered(EdgeIdx),
    #[error("edge #{edge} lies in blocks {first} and {second}")]
    EdgeInTwoBlocks { edge: EdgeIdx, first: BlockId, second: BlockId },
    #[error("edge #{edge} of block {block} has an endpoint outside the block")]
    EdgeOutsideBlock { edge: EdgeIdx, block: BlockId },
    #[error("junction #{0} is not in any block")]
    JunctionUncovered(JunctionIdx),
    #[error("blocks {first} and {second} share {shared} vertices")]
    BlocksShareVertices { first: BlockId, second: BlockId, shared: usize },
    #[error("junction #{vertex} is shared by blocks but is not a cut")]
    SharedVertexNotCut { vertex: JunctionIdx },
    #[error("cut #{0} is not contained in any block")]
    CutOutsideBlocks(JunctionIdx),
    #[error("block {0} is empty or not connected")]
    BlockDisconnected(BlockId),
    #[error("block-cut graph is not a tree")]
    NotATree,
}

/// A pair (blocks, cuts) where block edge sets partition the network's
/// edges and blocks meet only at single cut vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSet {
    pub blocks: Vec<Block>,
    pub cuts: BTreeSet<JunctionIdx>,
}

impl PartitionSet {
    /// The whole network as one block, no cuts.
    pub fn trivial(net: &Network) -> Self {
        Self {
            blocks: vec![Block {
                vertices: (0..net.num_junctions()).collect(),
                edges: (0..net.num_edges()).collect(),
            }],
            cuts: BTreeSet::new(),
        }
    }

    /// Blocks containing junction `v`.
    pub fn blocks_containing(&self, v: JunctionIdx) -> Vec<BlockId> {
        (0..self.blocks.len()).filter(|&b| self.blocks[b].contains(v)).collect()
    }

    pub fn two_node_blocks(&self) -> usize {
        self.blocks.iter().filter(|b| b.is_two_node()).count()
    }

    pub fn max_block_size(&self) -> usize {
        self.blocks.iter().map(Block::num_vertices).max().unwrap_or(0)
    }

    /// Check edge coverage/disjointness, pairwise single-cut intersections
    /// and connectivity of every block.
    pub fn check(&self, net: &Network) -> Result<(), PartitionError> {
        let mut owner: Vec<Option<BlockId>> = vec![None; net.num_edges()];
        for (b, block) in self.blocks.iter().enumerate() {
            for &e in &block.edges {
                let edge = net.edge(e);
                if !block.contains(edge.from) || !block.contains(edge.to) {
                    return Err(PartitionError::EdgeOutsideBlock { edge: e, block: b });
                }
                if let Some(first) = owner[e] {
                    return Err(PartitionError::EdgeInTwoBlocks { edge: e, first, second: b });
                }
                owner[e] = Some(b);
            }
        }
        if let Some(e) = owner.iter().position(Option::is_none) {
            return Err(PartitionError::EdgeUncovered(e));
        }

        let mut membership: Vec<Vec<BlockId>> = vec![Vec::new(); net.num_junctions()];
        for (b, block) in self.blocks.iter().enumerate() {
            for &v in &block.vertices {
                membership[v].push(b);
            }
        }
        let mut pair_count: HashMap<(BlockId, BlockId), usize> = HashMap::new();
        for (v, bs) in membership.iter().enumerate() {
            if bs.is_empty() {
                return Err(PartitionError::JunctionUncovered(v));
            }
            if bs.len() >= 2 && !self.cuts.contains(&v) {
                return Err(PartitionError::SharedVertexNotCut { vertex: v });
            }
            for i in 0..bs.len() {
                for j in i + 1..bs.len() {
                    *pair_count.entry((bs[i], bs[j])).or_default() += 1;
                }
            }
        }
        if let Some((&(first, second), &shared)) = pair_count.iter().filter(|(_, &c)| c > 1).min() {
            return Err(PartitionError::BlocksShareVertices { first, second, shared });
        }
        if let Some(&c) = self.cuts.iter().find(|&&c| c >= net.num_junctions() || membership[c].is_empty()) {
            return Err(PartitionError::CutOutsideBlocks(c));
        }
        for (b, block) in self.blocks.iter().enumerate() {
            if block.vertices.is_empty() {
                return Err(PartitionError::BlockDisconnected(b));
            }
            let g = LocalGraph::from_parts(net, block.vertices.clone(), &block.edges);
            if low_link(&g).reached != g.len() {
                return Err(PartitionError::BlockDisconnected(b));
            }
        }
        Ok(())
    }

    /// Canonical order (by vertex list) so partitions compare modulo block order.
    pub fn canonicalized(&self) -> Self {
        let mut blocks = self.blocks.clone();
        blocks.sort();
        Self {
            blocks,
            cuts: self.cuts.clone(),
        }
    }
}

fn require_connected(net: &Network) -> Result<(), PartitionError> {
    let components = net.connected_components().len();
    if components > 1 {
        Err(PartitionError::Disconnected { components })
    } else {
        Ok(())
    }
}

/// Vertices whose removal disconnects the (undirected) network.
pub fn find_articulation_points(net: &Network) -> Result<BTreeSet<JunctionIdx>, PartitionError> {
    require_connected(net)?;
    let ll = low_link(&LocalGraph::whole(net));
    Ok((0..net.num_junctions()).filter(|&v| ll.articulation[v]).collect())
}

/// Full decomposition into maximal non-separable blocks (single edges and
/// bundles of parallel edges count as 2-node blocks).
pub fn compute_blocks(net: &Network) -> Result<PartitionSet, PartitionError> {
    require_connected(net)?;
    if net.num_edges() == 0 {
        return Ok(PartitionSet::trivial(net));
    }
    let ll = low_link(&LocalGraph::whole(net));
    let mut blocks: Vec<Block> = ll.blocks.into_iter().map(|es| Block::from_edges(net, es)).collect();
    blocks.sort();
    Ok(PartitionSet {
        blocks,
        cuts: (0..net.num_junctions()).filter(|&v| ll.articulation[v]).collect(),
    })
}

/// Split `target` at `cut` into the connected components of `target - cut`,
/// re-attaching `cut` (and its edges) to each. The new blocks are appended
/// after the untouched ones.
pub fn refine_partition(
    net: &Network,
    p: &PartitionSet,
    target: BlockId,
    cut: JunctionIdx,
) -> Result<PartitionSet, PartitionError> {
    let block = p.blocks.get(target).ok_or(PartitionError::NoSuchBlock(target))?;
    let not_ap = PartitionError::NotArticulation { block: target, junction: cut };
    if !block.contains(cut) {
        return Err(not_ap);
    }

    // components of block - cut, by union over edges avoiding `cut`
    let local: HashMap<JunctionIdx, usize> = block.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut sets = crate::validate::DisjointSets::new(block.vertices.len());
    for &e in &block.edges {
        let edge = net.edge(e);
        if edge.from != cut && edge.to != cut {
            sets.union(local[&edge.from], local[&edge.to]);
        }
    }
    let mut component_of_root: HashMap<usize, usize> = HashMap::new();
    let mut pieces: Vec<Vec<EdgeIdx>> = Vec::new();
    let mut piece_vertices: Vec<Vec<JunctionIdx>> = Vec::new();
    for &v in &block.vertices {
        if v == cut {
            continue;
        }
        let root = sets.find(local[&v]);
        let k = *component_of_root.entry(root).or_insert_with(|| {
            pieces.push(Vec::new());
            piece_vertices.push(vec![cut]);
            pieces.len() - 1
        });
        piece_vertices[k].push(v);
    }
    if pieces.len() < 2 {
        return Err(not_ap);
    }
    for &e in &block.edges {
        let edge = net.edge(e);
        let inner = if edge.from == cut { edge.to } else { edge.from };
        pieces[component_of_root[&sets.find(local[&inner])]].push(e);
    }

    let mut blocks: Vec<Block> = p
        .blocks
        .iter()
        .enumerate()
        .filter(|&(b, _)| b != target)
        .map(|(_, b)| b.clone())
        .collect();
    for (mut edges, mut vertices) in pieces.into_iter().zip(piece_vertices) {
        edges.sort_unstable();
        vertices.sort_unstable();
        blocks.push(Block { vertices, edges });
    }
    let mut cuts = p.cuts.clone();
    cuts.insert(cut);
    Ok(PartitionSet { blocks, cuts })
}

/// Articulation points of one block, each paired with the size of the
/// largest piece its removal would leave.
pub fn block_articulation_points(net: &Network, block: &Block) -> Vec<(JunctionIdx, usize)> {
    let g = LocalGraph::from_parts(net, block.vertices.clone(), &block.edges);
    let ll = low_link(&g);
    (0..g.len())
        .filter(|&i| ll.articulation[i])
        .map(|i| (g.vertices[i], ll.largest_piece[i]))
        .collect()
}

/// A block over the size cap that has no articulation point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OversizedBlock {
    /// Partition reached when refinement got stuck.
    pub partition: PartitionSet,
    /// Largest non-separable block above the cap.
    pub block: BlockId,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SizedPartition {
    Fits(PartitionSet),
    Oversized(OversizedBlock),
}

/// Refine greedily until every block has at most `max_vertices` vertices,
/// or report the largest oversized block that cannot be split.
///
/// The split point for an oversized block is the articulation point whose
/// removal leaves the smallest largest piece; ties go to the smallest
/// junction id.
pub fn partition_with_max_size(net: &Network, max_vertices: usize) -> Result<SizedPartition, PartitionError> {
    if max_vertices < 2 {
        return Err(PartitionError::MaxSizeTooSmall(max_vertices));
    }
    require_connected(net)?;
    let mut p = PartitionSet::trivial(net);
    let mut stuck: BTreeSet<Block> = BTreeSet::new();
    loop {
        let candidate = p
            .blocks
            .iter()
            .position(|b| b.num_vertices() > max_vertices && !stuck.contains(b));
        let Some(target) = candidate else { break };
        let aps = block_articulation_points(net, &p.blocks[target]);
        let best = aps
            .into_iter()
            .min_by(|a, b| a.1.cmp(&b.1).then_with(|| net.junction(a.0).id.cmp(&net.junction(b.0).id)));
        match best {
            Some((cut, _)) => p = refine_partition(net, &p, target, cut)?,
            None => {
                stuck.insert(p.blocks[target].clone());
            }
        }
    }
    let worst = p
        .blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| b.num_vertices() > max_vertices)
        .max_by_key(|(i, b)| (b.num_vertices(), std::cmp::Reverse(*i)));
    Ok(match worst {
        None => SizedPartition::Fits(p),
        Some((block, b)) => {
            let size = b.num_vertices();
            SizedPartition::Oversized(OversizedBlock { partition: p, block, size })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{four_around_center, topo};

    #[test]
    fn triangle_has_no_articulation_points() {
        let g = topo(3, &[(0, 1), (1, 2), (2, 0)]);
        assert!(find_articulation_points(&g).unwrap().is_empty());
        let p = compute_blocks(&g).unwrap();
        assert_eq!(p.blocks.len(), 1);
        assert!(p.cuts.is_empty());
    }

    #[test]
    fn path_decomposes_into_edges() {
        let g = topo(3, &[(0, 1), (1, 2)]);
        assert_eq!(find_articulation_points(&g).unwrap(), BTreeSet::from([1]));
        let p = compute_blocks(&g).unwrap();
        assert_eq!(p.blocks.len(), 2);
        assert!(p.blocks.iter().all(Block::is_two_node));
        assert_eq!(p.cuts, BTreeSet::from([1]));
        p.check(&g).unwrap();
    }

    #[test]
    fn disconnected_input_is_rejected() {
        let g = topo(4, &[(0, 1), (2, 3)]);
        assert!(matches!(find_articulation_points(&g), Err(PartitionError::Disconnected { components: 2 })));
        assert!(compute_blocks(&g).is_err());
    }

    #[test]
    fn refine_at_center_gives_four_blocks() {
        let g = four_around_center();
        let p = refine_partition(&g, &PartitionSet::trivial(&g), 0, 0).unwrap();
        assert_eq!(p.blocks.len(), 4);
        assert_eq!(p.cuts, BTreeSet::from([0]));
        p.check(&g).unwrap();
        let sizes: BTreeSet<_> = p.blocks.iter().map(Block::num_vertices).collect();
        assert_eq!(sizes, BTreeSet::from([2, 3, 4]));
    }

    #[test]
    fn refining_a_two_node_block_fails() {
        let g = topo(3, &[(0, 1), (1, 2)]);
        let p = compute_blocks(&g).unwrap();
        for b in 0..p.blocks.len() {
            for &v in &p.blocks[b].vertices.clone() {
                assert!(matches!(refine_partition(&g, &p, b, v), Err(PartitionError::NotArticulation { .. })));
            }
        }
        assert!(matches!(refine_partition(&g, &p, 7, 0), Err(PartitionError::NoSuchBlock(7))));
    }

    #[test]
    fn size_cap_examples() {
        let g = four_around_center();
        assert_eq!(
            partition_with_max_size(&g, 9).unwrap(),
            SizedPartition::Fits(PartitionSet::trivial(&g))
        );
        let path = topo(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        match partition_with_max_size(&path, 2).unwrap() {
            SizedPartition::Fits(p) => {
                assert_eq!(p.blocks.len(), 4);
                assert!(p.blocks.iter().all(Block::is_two_node));
                p.check(&path).unwrap();
            }
            other => panic!("expected a fitting partition, got {other:?}"),
        }
        // square with a tail: the square cannot be split below 4
        let sq = topo(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 4)]);
        match partition_with_max_size(&sq, 3).unwrap() {
            SizedPartition::Oversized(o) => assert_eq!(o.size, 4),
            other => panic!("expected oversized, got {other:?}"),
        }
        assert!(matches!(partition_with_max_size(&sq, 1), Err(PartitionError::MaxSizeTooSmall(1))));
    }

    #[test]
    fn balanced_split_prefers_the_middle() {
        // path of 7: the middle vertex leaves pieces of 3 and 3
        let path = topo(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6)]);
        let SizedPartition::Fits(p) = partition_with_max_size(&path, 4).unwrap() else {
            panic!("path must fit")
        };
        assert_eq!(p.cuts, BTreeSet::from([3]));
    }

    #[test]
    fn check_rejects_bad_partitions() {
        let g = topo(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        // two blocks sharing two vertices
        let bad = PartitionSet {
            blocks: vec![Block::from_edges(&g, vec![0, 1]), Block::from_edges(&g, vec![2, 3])],
            cuts: BTreeSet::from([0, 2]),
        };
        assert!(matches!(bad.check(&g), Err(PartitionError::BlocksShareVertices { .. })));
        let missing = PartitionSet {
            blocks: vec![Block::from_edges(&g, vec![0, 1, 2])],
            cuts: BTreeSet::new(),
        };
        assert_eq!(missing.check(&g), Err(PartitionError::EdgeUncovered(3)));
        let path = topo(3, &[(0, 1), (1, 2)]);
        let no_cut = PartitionSet {
            blocks: vec![Block::from_edges(&path, vec![0]), Block::from_edges(&path, vec![1])],
            cuts: BTreeSet::new(),
        };
        assert_eq!(no_cut.check(&path), Err(PartitionError::SharedVertexNotCut { vertex: 1 }));
    }
}
