//! Steady-state potential-driven network flow, solved block by block over
//! a (generalized) block-cut tree.
//!
//! The pipeline: [`compute_blocks`] or [`partition_with_max_size`] picks a
//! partition, [`build_block_cut_tree`] certifies it, [`solve_tree_flows`]
//! settles the flows between blocks and [`solve_hierarchical`] solves the
//! blocks level by level from the slack block outwards.
//! [`solve_monolithic`] runs Newton on the whole network and serves as the
//! reference.

pub mod augment;
pub mod document;
pub mod generate;
mod graph;
pub mod hierarchical;
pub mod network;
pub mod partition;
pub mod solver;
pub mod stats;
pub mod tree;
pub mod tree_flow;
pub mod validate;
pub mod verify;

#[cfg(test)]
pub(crate) mod testutil;

pub use augment::{build_augmented_network, AugmentError, AugmentedNetwork, Replica};
pub use document::{parse_network, DocumentError, NetworkDocument, SolutionDocument};
pub use generate::{generate_network, GenerateError};
pub use hierarchical::{
    level_schedule, solve_hierarchical, solve_monolithic, BlockMethod, BlockReport, LevelSchedule, SolveReport,
};
pub use network::{
    edge_residual, node_residual, Edge, EdgeIdx, Element, Junction, JunctionIdx, JunctionKind, Network,
    NetworkError, Scales, Solution,
};
pub use partition::{
    compute_blocks, find_articulation_points, partition_with_max_size, refine_partition, Block, BlockId,
    OversizedBlock, PartitionError, PartitionSet, SizedPartition,
};
pub use solver::{
    assemble_jacobian, multi_start_solutions, random_start, solve_block_newton, solve_block_newton_from,
    solve_two_node_block, BlockProblem, NewtonSystem, SolveError, SolverOptions, SparseJacobian,
};
pub use stats::{compute_stats, StatsReport};
pub use tree::{build_block_cut_tree, BlockCutTree, TreeIdx, TreeVertex};
pub use tree_flow::{agglomerate_injections, solve_tree_flows, TreeFlowError, TreeFlowProblem, TreeFlows};
pub use validate::{validate_network, ValidationReport, Violation};
pub use verify::{verify_solution, VerificationReport};
