//! Undirected low-link traversal shared by articulation-point and block
//! computations. Works on any vertex/edge subset of a [`Network`] and
//! treats parallel edges as distinct (parent skipping is by edge, not by
//! vertex).

use std::collections::HashMap;

use crate::network::{EdgeIdx, JunctionIdx, Network};

pub(crate) struct LocalGraph {
    pub(crate) vertices: Vec<JunctionIdx>,
    adj: Vec<Vec<(usize, EdgeIdx)>>,
}

impl LocalGraph {
    pub(crate) fn whole(net: &Network) -> Self {
        let vertices: Vec<_> = (0..net.num_junctions()).collect();
        let edges: Vec<_> = (0..net.num_edges()).collect();
        Self::from_parts(net, vertices, &edges)
    }

    /// `edges` must only touch junctions listed in `vertices`.
    pub(crate) fn from_parts(net: &Network, vertices: Vec<JunctionIdx>, edges: &[EdgeIdx]) -> Self {
        let local: HashMap<JunctionIdx, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj = vec![Vec::new(); vertices.len()];
        for &e in edges {
            let edge = net.edge(e);
            let (a, b) = (local[&edge.from], local[&edge.to]);
            adj[a].push((b, e));
            adj[b].push((a, e));
        }
        Self { vertices, adj }
    }

    pub(crate) fn len(&self) -> usize {
        self.vertices.len()
    }
}

pub(crate) struct LowLink {
    /// Number of vertices reached from the start vertex.
    pub(crate) reached: usize,
    /// Per local vertex: is it an articulation point.
    pub(crate) articulation: Vec<bool>,
    /// Per local vertex: size of the largest component left after removing it.
    pub(crate) largest_piece: Vec<usize>,
    /// Biconnected components as edge lists.
    pub(crate) blocks: Vec<Vec<EdgeIdx>>,
}

const UNSEEN: usize = usize::MAX;

struct Frame {
    v: usize,
    parent_edge: Option<EdgeIdx>,
    next: usize,
}

/// Single iterative depth-first traversal from local vertex 0.
pub(crate) fn low_link(g: &LocalGraph) -> LowLink {
    let n = g.len();
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut size = vec![1usize; n];
    let mut separated = vec![0usize; n];
    let mut largest = vec![0usize; n];
    let mut root_children = 0usize;
    let mut articulation = vec![false; n];
    let mut blocks = Vec::new();
    let mut edge_stack: Vec<EdgeIdx> = Vec::new();
    let mut time = 0usize;
    if n == 0 {
        return LowLink {
            reached: 0,
            articulation,
            largest_piece: largest,
            blocks,
        };
    }

    disc[0] = time;
    low[0] = time;
    time += 1;
    let mut stack = vec![Frame {
        v: 0,
        parent_edge: None,
        next: 0,
    }];

    while let Some(frame) = stack.last_mut() {
        let v = frame.v;
        if frame.next < g.adj[v].len() {
            let (w, e) = g.adj[v][frame.next];
            frame.next += 1;
            if Some(e) == frame.parent_edge {
                continue;
            }
            if disc[w] == UNSEEN {
                disc[w] = time;
                low[w] = time;
                time += 1;
                edge_stack.push(e);
                stack.push(Frame {
                    v: w,
                    parent_edge: Some(e),
                    next: 0,
                });
            } else if disc[w] < disc[v] {
                edge_stack.push(e);
                low[v] = low[v].min(disc[w]);
            }
            continue;
        }

        let finished = stack.pop().expect("non-empty");
        let Some(parent) = stack.last() else { break };
        let (u, w) = (parent.v, finished.v);
        let tree_edge = finished.parent_edge.expect("child frame has a parent edge");
        low[u] = low[u].min(low[w]);
        size[u] += size[w];
        if low[w] >= disc[u] {
            let mut block = Vec::new();
            while let Some(e) = edge_stack.pop() {
                block.push(e);
                if e == tree_edge {
                    break;
                }
            }
            block.sort_unstable();
            blocks.push(block);
            separated[u] += size[w];
            largest[u] = largest[u].max(size[w]);
            if u == 0 {
                root_children += 1;
            } else {
                articulation[u] = true;
            }
        }
    }

    let reached = disc.iter().filter(|&&d| d != UNSEEN).count();
    articulation[0] = root_children >= 2;
    for v in 0..n {
        let rest = reached - 1 - separated[v];
        largest[v] = largest[v].max(rest);
    }
    LowLink {
        reached,
        articulation,
        largest_piece: largest,
        blocks,
    }
}
