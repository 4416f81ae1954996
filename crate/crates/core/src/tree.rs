use std::collections::{HashMap, VecDeque};

use crate::network::{JunctionIdx, Network};
use crate::partition::{BlockId, PartitionError, PartitionSet};

/// Index of a vertex of a [`BlockCutTree`].
pub type TreeIdx = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreeVertex {
    Block(BlockId),
    Cut(JunctionIdx),
}

/// Bipartite tree on blocks and cut vertices, with an edge `(B, c)`
/// whenever `c` lies in `B`.
///
/// Tree vertex `b < num_blocks()` is block `b`; cut vertices follow in
/// ascending junction order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCutTree {
    vertices: Vec<TreeVertex>,
    /// `(block tree vertex, cut tree vertex)`.
    edges: Vec<(TreeIdx, TreeIdx)>,
    adjacency: Vec<Vec<(TreeIdx, usize)>>,
    cut_index: HashMap<JunctionIdx, TreeIdx>,
    num_blocks: usize,
}

/// Build the block-cut tree for a partition, checking the partition and
/// certifying that the result is a tree.
pub fn build_block_cut_tree(net: &Network, p: &PartitionSet) -> Result<BlockCutTree, PartitionError> {
    p.check(net)?;
    let num_blocks = p.blocks.len();
    let mut vertices: Vec<TreeVertex> = (0..num_blocks).map(TreeVertex::Block).collect();
    let mut cut_index = HashMap::new();
    for &c in &p.cuts {
        cut_index.insert(c, vertices.len());
        vertices.push(TreeVertex::Cut(c));
    }
    let mut edges = Vec::new();
    for (b, block) in p.blocks.iter().enumerate() {
        for v in &block.vertices {
            if let Some(&t) = cut_index.get(v) {
                edges.push((b, t));
            }
        }
    }
    let mut adjacency = vec![Vec::new(); vertices.len()];
    for (k, &(b, c)) in edges.iter().enumerate() {
        adjacency[b].push((c, k));
        adjacency[c].push((b, k));
    }
    let tree = BlockCutTree {
        vertices,
        edges,
        adjacency,
        cut_index,
        num_blocks,
    };
    if !tree.is_tree() {
        return Err(PartitionError::NotATree);
    }
    Ok(tree)
}

impl BlockCutTree {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    pub fn num_cuts(&self) -> usize {
        self.vertices.len() - self.num_blocks
    }

    pub fn vertex(&self, t: TreeIdx) -> TreeVertex {
        self.vertices[t]
    }

    pub fn vertices(&self) -> &[TreeVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(TreeIdx, TreeIdx)] {
        &self.edges
    }

    /// `(neighbor, edge index)` pairs.
    pub fn neighbors(&self, t: TreeIdx) -> &[(TreeIdx, usize)] {
        &self.adjacency[t]
    }

    pub fn block_vertex(&self, b: BlockId) -> TreeIdx {
        debug_assert!(b < self.num_blocks);
        b
    }

    pub fn cut_vertex(&self, c: JunctionIdx) -> Option<TreeIdx> {
        self.cut_index.get(&c).copied()
    }

    /// `#edges == #vertices - 1` and connected.
    pub fn is_tree(&self) -> bool {
        if self.vertices.is_empty() || self.edges.len() + 1 != self.vertices.len() {
            return false;
        }
        self.distances_from(&[0]).iter().all(Option::is_some)
    }

    /// Breadth-first distances (in tree edges) from the nearest of `roots`.
    pub fn distances_from(&self, roots: &[TreeIdx]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertices.len()];
        let mut queue = VecDeque::new();
        for &r in roots {
            if dist[r].is_none() {
                dist[r] = Some(0);
                queue.push_back(r);
            }
        }
        while let Some(u) = queue.pop_front() {
            let d = dist[u].expect("queued vertices have a distance");
            for &(w, _) in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}
