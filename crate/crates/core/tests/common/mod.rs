#![allow(dead_code)]

use bcflow_core::{Element, Junction, JunctionKind, Network};
use proptest::prelude::*;

/// Connected topology: a random tree on `n` vertices (parent of `v` is
/// `parents[v - 1] % v`) plus extra edges, possibly parallel.
pub fn topology(n: usize, parents: &[usize], extra: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (parents[v - 1] % v, v)).collect();
    for &(a, b) in extra {
        let (a, b) = (a % n, b % n);
        if a != b {
            edges.push((a, b));
        }
    }
    edges
}

pub fn build(junctions: Vec<Junction>, edges: &[(usize, usize)], elements: &[Element]) -> Network {
    let es = edges
        .iter()
        .zip(elements)
        .enumerate()
        .map(|(k, (&(a, b), el))| (format!("e{k}"), format!("v{a}"), format!("v{b}"), *el))
        .collect();
    Network::new(junctions, es).unwrap()
}

pub fn pipe_topology(n: usize, edges: &[(usize, usize)]) -> Network {
    let js = (0..n).map(|i| Junction::non_slack(format!("v{i}"), 0.0)).collect();
    build(js, edges, &vec![Element::Pipe { alpha: 1.0 }; edges.len()])
}

/// Strategy for connected pipe topologies with `lo..hi` vertices.
pub fn arb_topology(lo: usize, hi: usize, max_extra: usize) -> impl Strategy<Value = Network> {
    (lo..hi)
        .prop_flat_map(move |n| {
            (
                Just(n),
                prop::collection::vec(any::<usize>(), n - 1),
                prop::collection::vec((any::<usize>(), any::<usize>()), 0..=max_extra),
            )
        })
        .prop_map(|(n, parents, extra)| pipe_topology(n, &topology(n, &parents, &extra)))
}

/// Solvable physics on a connected topology: one slack at potential 100,
/// tree edges of every kind, chords pipe or linear, small withdrawals.
#[derive(Debug, Clone)]
pub struct Physics {
    pub n: usize,
    pub parents: Vec<usize>,
    pub chords: Vec<(usize, usize)>,
    pub kinds: Vec<u8>,
    pub params: Vec<f64>,
    pub demands: Vec<f64>,
    pub slack: usize,
}

pub fn arb_physics(lo: usize, hi: usize, max_chords: usize) -> impl Strategy<Value = Physics> {
    (lo..hi)
        .prop_flat_map(move |n| {
            let m = n - 1 + max_chords;
            (
                Just(n),
                prop::collection::vec(any::<usize>(), n - 1),
                prop::collection::vec((any::<usize>(), any::<usize>()), 0..=max_chords),
                prop::collection::vec(0u8..4, m),
                prop::collection::vec(0.0f64..1.0, m),
                prop::collection::vec(-0.3f64..1.0, n),
                0..n,
            )
        })
        .prop_map(|(n, parents, chords, kinds, params, demands, slack)| Physics {
            n,
            parents,
            chords,
            kinds,
            params,
            demands,
            slack,
        })
}

impl Physics {
    pub fn network(&self) -> Network {
        let edges = topology(self.n, &self.parents, &self.chords);
        let elements: Vec<Element> = edges
            .iter()
            .enumerate()
            .map(|(k, _)| {
                let u = self.params[k];
                // flow-insensitive kinds only on tree edges, so no lossless cycle
                let kind = if k < self.n - 1 { self.kinds[k] } else { self.kinds[k] % 2 };
                match kind {
                    0 => Element::Pipe { alpha: 0.5 + 1.5 * u },
                    1 => Element::Linear { r: 0.5 + 2.0 * u },
                    2 => Element::Ideal { gamma: 0.9 + 0.2 * u },
                    _ => Element::Offset { c: 2.0 * u - 1.0 },
                }
            })
            .collect();
        let js = (0..self.n)
            .map(|i| {
                if i == self.slack {
                    Junction::slack(format!("v{i}"), 100.0)
                } else {
                    Junction::non_slack(format!("v{i}"), self.demands[i])
                }
            })
            .collect();
        build(js, &edges, &elements)
    }
}

pub fn with_slack(net: &Network, slack: usize, potential: f64) -> Network {
    net.with_junction_kinds(&[(slack, JunctionKind::Slack { potential })])
}

/// `|a - b| <= tol * (1 + |b|)` componentwise.
pub fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / (1.0 + y.abs()))
        .fold(0.0, f64::max)
}
