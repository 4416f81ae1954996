mod common;

use std::collections::BTreeSet;

use bcflow_core::partition::block_articulation_points;
use bcflow_core::{
    build_augmented_network, build_block_cut_tree, compute_blocks, find_articulation_points, refine_partition, Network,
    PartitionSet,
};
use common::arb_topology;
use proptest::prelude::*;

fn connected_without(net: &Network, removed: Option<usize>, edges: Option<&[usize]>) -> bool {
    let n = net.num_junctions();
    let allowed: Vec<usize> = edges.map(<[usize]>::to_vec).unwrap_or_else(|| (0..net.num_edges()).collect());
    let mut verts: BTreeSet<usize> = allowed.iter().flat_map(|&e| [net.edge(e).from, net.edge(e).to]).collect();
    if edges.is_none() {
        verts.extend(0..n);
    }
    if let Some(r) = removed {
        verts.remove(&r);
    }
    let Some(&start) = verts.iter().next() else { return true };
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &e in &allowed {
            let (a, b) = (net.edge(e).from, net.edge(e).to);
            if Some(a) == removed || Some(b) == removed {
                continue;
            }
            for (x, y) in [(a, b), (b, a)] {
                if x == u && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
    }
    seen.len() == verts.len()
}

fn brute_articulation_points(net: &Network) -> BTreeSet<usize> {
    (0..net.num_junctions()).filter(|&v| !connected_without(net, Some(v), None)).collect()
}

fn assert_eq3(net: &Network, p: &PartitionSet) {
    let mut owner = vec![None; net.num_edges()];
    for (b, block) in p.blocks.iter().enumerate() {
        for &e in &block.edges {
            assert!(owner[e].is_none(), "edge {e} in two blocks");
            owner[e] = Some(b);
        }
        assert!(connected_without(net, None, Some(&block.edges)), "block {b} disconnected");
    }
    assert!(owner.iter().all(Option::is_some), "edge uncovered");
    for a in 0..p.blocks.len() {
        for b in a + 1..p.blocks.len() {
            let shared: Vec<usize> = p.blocks[a]
                .vertices
                .iter()
                .filter(|v| p.blocks[b].contains(**v))
                .copied()
                .collect();
            assert!(shared.len() <= 1, "blocks {a}, {b} share {shared:?}");
            if let [v] = shared[..] {
                assert!(p.cuts.contains(&v));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn articulation_points_match_brute_force(net in arb_topology(3, 13, 8)) {
        prop_assert_eq!(find_articulation_points(&net).unwrap(), brute_articulation_points(&net));
    }

    #[test]
    fn blocks_satisfy_partition_conditions(net in arb_topology(3, 16, 10)) {
        let p = compute_blocks(&net).unwrap();
        assert_eq3(&net, &p);
        prop_assert_eq!(&p.cuts, &find_articulation_points(&net).unwrap());
        for block in &p.blocks {
            if block.num_vertices() > 2 {
                prop_assert!(block_articulation_points(&net, block).is_empty());
            }
        }
        let tree = build_block_cut_tree(&net, &p).unwrap();
        prop_assert_eq!(tree.num_vertices(), p.blocks.len() + p.cuts.len());
        prop_assert_eq!(tree.edges().len() + 1, tree.num_vertices());
        prop_assert!(tree.distances_from(&[0]).iter().all(Option::is_some));
    }

    #[test]
    fn refinement_reaches_the_block_decomposition(
        net in arb_topology(3, 16, 10),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 32),
    ) {
        let mut p = PartitionSet::trivial(&net);
        let mut step = 0;
        loop {
            let separable: Vec<(usize, Vec<(usize, usize)>)> = p
                .blocks
                .iter()
                .enumerate()
                .map(|(b, block)| (b, block_articulation_points(&net, block)))
                .filter(|(_, aps)| !aps.is_empty())
                .collect();
            if separable.is_empty() {
                break;
            }
            let pick = &picks[step % picks.len()];
            let (target, aps) = &separable[pick.index(separable.len())];
            let cut = aps[pick.index(aps.len())].0;
            let next = refine_partition(&net, &p, *target, cut).unwrap();
            assert_eq3(&net, &next);
            // hierarchy: finer blocks, growing cut set, each new block inside one old block
            prop_assert!(next.blocks.len() > p.blocks.len());
            prop_assert!(next.cuts.is_superset(&p.cuts) && next.cuts.contains(&cut));
            for block in &next.blocks {
                let parents = p
                    .blocks
                    .iter()
                    .filter(|old| block.edges.iter().all(|e| old.edges.contains(e)))
                    .count();
                prop_assert_eq!(parents, 1);
            }
            p = next;
            step += 1;
        }
        prop_assert_eq!(p.canonicalized(), compute_blocks(&net).unwrap().canonicalized());
    }

    #[test]
    fn merging_replicas_round_trips(net in arb_topology(3, 16, 10), trivial in any::<bool>()) {
        let p = if trivial { PartitionSet::trivial(&net) } else { compute_blocks(&net).unwrap() };
        let aug = build_augmented_network(&net, &p).unwrap();
        let replicas: usize = p.cuts.iter().map(|&c| p.blocks_containing(c).len()).sum();
        prop_assert_eq!(aug.network.num_junctions(), net.num_junctions() + replicas);
        prop_assert_eq!(aug.tie_edges().count(), replicas);
        prop_assert_eq!(aug.merge_replicas(), net);
    }
}
