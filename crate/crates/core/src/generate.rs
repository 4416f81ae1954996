//! Seeded random pipe networks: a random tree plus chord edges.

use std::collections::HashSet;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::network::{Element, Junction, Network};

pub const GENERATED_SLACK_POTENTIAL: f64 = 100.0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerateError {
    #[error("need at least 3 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("{nodes} nodes admit at most {max} chords, asked for {cycles}")]
    TooManyCycles { nodes: usize, cycles: usize, max: usize },
}

/// Connected pipe network on `nodes` junctions with `cycles` independent
/// cycles.
///
/// Junction `n0` is the only slack, at potential 100. Every edge is a pipe
/// with `alpha` uniform in `[0.5, 2]`; the graph is simple. Withdrawals are
/// positive random weights scaled so that the total demand `D` satisfies
/// `2 * depth * D^2 <= 50`, which bounds every tree-path drop from the slack
/// by half the slack potential.
pub fn generate_network(nodes: usize, cycles: usize, seed: u64) -> Result<Network, GenerateError> {
    if nodes < 3 {
        return Err(GenerateError::TooFewNodes(nodes));
    }
    let max = nodes * (nodes - 1) / 2 - (nodes - 1);
    if cycles > max {
        return Err(GenerateError::TooManyCycles { nodes, cycles, max });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(nodes - 1 + cycles);
    let mut present = HashSet::new();
    let mut depth = vec![0usize; nodes];
    for v in 1..nodes {
        let parent = rng.random_range(0..v);
        depth[v] = depth[parent] + 1;
        pairs.push((parent, v));
        present.insert((parent, v));
    }
    while pairs.len() < nodes - 1 + cycles {
        let a = rng.random_range(0..nodes);
        let b = rng.random_range(0..nodes);
        let key = (a.min(b), a.max(b));
        if a != b && present.insert(key) {
            pairs.push(key);
        }
    }
    let edges: Vec<(String, String, String, Element)> = pairs
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| {
            let alpha = rng.random_range(0.5..=2.0);
            (format!("p{k}"), format!("n{a}"), format!("n{b}"), Element::Pipe { alpha })
        })
        .collect();

    let weights: Vec<f64> = (1..nodes).map(|_| rng.random_range(0.1..=1.0)).collect();
    let total: f64 = weights.iter().sum();
    let max_depth = *depth.iter().max().expect("nodes >= 3") as f64;
    let demand = (0.5 * GENERATED_SLACK_POTENTIAL / (2.0 * max_depth)).sqrt();
    let mut junctions = vec![Junction::slack("n0", GENERATED_SLACK_POTENTIAL)];
    junctions.extend(
        weights
            .iter()
            .enumerate()
            .map(|(i, w)| Junction::non_slack(format!("n{}", i + 1), demand * w / total)),
    );
    Ok(Network::new(junctions, edges).expect("generated networks are well-formed"))
}
