use crate::network::{Element, Junction, Network};

/// Pipe network with junctions `v0..v{n-1}` (all non-slack, zero injection).
pub(crate) fn topo(n: usize, edges: &[(usize, usize)]) -> Network {
    let js = (0..n).map(|i| Junction::non_slack(format!("v{i}"), 0.0)).collect();
    let es = edges
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| (format!("e{k}"), format!("v{a}"), format!("v{b}"), Element::Pipe { alpha: 1.0 }))
        .collect();
    Network::new(js, es).unwrap()
}

/// Four branches around center `v0`: a triangle, a square, a single edge
/// and a path of two edges.
pub(crate) fn four_around_center() -> Network {
    topo(
        9,
        &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 5), (5, 0), (0, 6), (0, 7), (7, 8)],
    )
}
