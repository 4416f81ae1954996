//! The augmented network: every cut vertex is replicated once per block
//! containing it, the block's edges at the cut are re-homed onto the
//! replica, and a lossless tie edge (original -> replica, `gamma = 1`)
//! forces equal potentials.

use std::collections::HashSet;

use crate::network::{Edge, EdgeIdx, Element, Junction, JunctionIdx, Network, NetworkError, Solution};
use crate::partition::{BlockId, PartitionError, PartitionSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Replica {
    /// Replica junction in the augmented network.
    pub junction: JunctionIdx,
    /// Cut junction it replicates (same index in both networks).
    pub original: JunctionIdx,
    pub block: BlockId,
    /// Tie edge `original -> replica` in the augmented network.
    pub tie_edge: EdgeIdx,
}

/// Junctions `0..n` and edges `0..m` of the augmented network coincide with
/// those of the original; replicas and tie edges follow.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedNetwork {
    pub network: Network,
    pub replicas: Vec<Replica>,
    original_junctions: usize,
    original_edges: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum AugmentError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

fn fresh_id(base: String, taken: &mut HashSet<String>) -> String {
    let mut id = base;
    while taken.contains(&id) {
        id.push('\'');
    }
    taken.insert(id.clone());
    id
}

/// Replicas carry zero injection, including replicas of a slack cut: the
/// slack datum reaches them through the tie edge, which keeps the
/// augmented system free of slack pairs joined by lossless edges.
pub fn build_augmented_network(net: &Network, p: &PartitionSet) -> Result<AugmentedNetwork, AugmentError> {
    p.check(net)?;
    let mut junctions: Vec<Junction> = net.junctions().to_vec();
    let mut edges: Vec<Edge> = net.edges().to_vec();
    let mut taken_j: HashSet<String> = junctions.iter().map(|j| j.id.clone()).collect();
    let mut taken_e: HashSet<String> = edges.iter().map(|e| e.id.clone()).collect();
    let mut replicas = Vec::new();

    for &c in &p.cuts {
        for b in p.blocks_containing(c) {
            let id = fresh_id(format!("{}~b{}", net.junction(c).id, b), &mut taken_j);
            let r = junctions.len();
            junctions.push(Junction::non_slack(id.clone(), 0.0));
            for &e in &p.blocks[b].edges {
                let edge = &mut edges[e];
                if edge.from == c {
                    edge.from = r;
                }
                if edge.to == c {
                    edge.to = r;
                }
            }
            let tie_id = fresh_id(format!("tie:{id}"), &mut taken_e);
            let tie_edge = edges.len();
            edges.push(Edge {
                id: tie_id,
                from: c,
                to: r,
                element: Element::Ideal { gamma: 1.0 },
            });
            replicas.push(Replica {
                junction: r,
                original: c,
                block: b,
                tie_edge,
            });
        }
    }

    Ok(AugmentedNetwork {
        network: Network::from_indexed(junctions, edges)?,
        replicas,
        original_junctions: net.num_junctions(),
        original_edges: net.num_edges(),
    })
}

impl AugmentedNetwork {
    pub fn tie_edges(&self) -> impl Iterator<Item = EdgeIdx> + '_ {
        self.replicas.iter().map(|r| r.tie_edge)
    }

    pub fn is_tie_edge(&self, e: EdgeIdx) -> bool {
        e >= self.original_edges
    }

    /// Original junction a (possibly replica) junction stands for.
    pub fn original_of(&self, j: JunctionIdx) -> JunctionIdx {
        if j < self.original_junctions {
            j
        } else {
            self.replicas[j - self.original_junctions].original
        }
    }

    /// Drop tie edges and fold replicas back into their cut vertices.
    pub fn merge_replicas(&self) -> Network {
        let junctions = self.network.junctions()[..self.original_junctions].to_vec();
        let edges = self.network.edges()[..self.original_edges]
            .iter()
            .map(|e| Edge {
                id: e.id.clone(),
                from: self.original_of(e.from),
                to: self.original_of(e.to),
                element: e.element,
            })
            .collect();
        Network::from_indexed(junctions, edges).expect("merging replicas restores a well-formed network")
    }

    /// Restrict a solution of the augmented network to the original
    /// junctions and edges (tie flows are dropped).
    pub fn project(&self, sol: &Solution) -> Solution {
        Solution {
            potentials: sol.potentials[..self.original_junctions].to_vec(),
            flows: sol.flows[..self.original_edges].to_vec(),
            ..sol.clone()
        }
    }
}
