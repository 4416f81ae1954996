//! Single-block solvers for the steady-state flow system: Newton-Raphson
//! on the sparse Jacobian, and closed-form substitution for 2-node blocks.

mod jacobian;
mod linsolve;
mod newton;
mod two_node;

use thiserror::Error;

use crate::network::{Network, Scales};
use crate::partition::{BlockId, PartitionError};
use crate::tree_flow::TreeFlowError;
use crate::validate::ValidationReport;
use crate::verify::DimensionMismatch;

pub use jacobian::{assemble_jacobian, NewtonSystem, SparseJacobian};
pub use newton::{multi_start_solutions, random_start, solve_block_newton, solve_block_newton_from};
pub use two_node::solve_two_node_block;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Convergence threshold on the scaled residual infinity norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Lower bound on `|dg/df|` for pipe edges in the Jacobian.
    pub deriv_floor: f64,
    pub flat_flow_init: f64,
    /// Starts tried by [`solve_block_newton`]: the flat start, then
    /// `multi_start_seeds - 1` seeded random starts if it fails.
    pub multi_start_seeds: usize,
    /// Multiplier on each Newton step. `1.0` is the plain full step.
    pub step_scale: f64,
    /// Nondimensionalize potentials and flows before iterating.
    pub scale_variables: bool,
    /// Solve the blocks of one level concurrently (hierarchical solve only).
    pub parallel: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 50,
            deriv_floor: 1e-8,
            flat_flow_init: 0.0,
            multi_start_seeds: 1,
            step_scale: 1.0,
            scale_variables: true,
            parallel: false,
        }
    }
}

impl SolverOptions {
    pub fn check(&self) -> Result<(), SolveError> {
        let ok = self.tol > 0.0
            && self.max_iter >= 1
            && self.deriv_floor > 0.0
            && self.multi_start_seeds >= 1
            && self.step_scale > 0.0
            && self.flat_flow_init.is_finite();
        if ok {
            Ok(())
        } else {
            Err(SolveError::BadOptions(*self))
        }
    }
}

/// One block (or a whole network) ready to be solved: boundary data
/// already folded into slack potentials and injections.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockProblem {
    pub network: Network,
    pub options: SolverOptions,
    /// Reference magnitudes; `None` uses the network's own.
    pub scales: Option<Scales>,
}

impl BlockProblem {
    pub fn new(network: Network, options: SolverOptions) -> Self {
        Self {
            network,
            options,
            scales: None,
        }
    }

    /// Scales used for convergence checks and reported residuals.
    pub fn reference_scales(&self) -> Scales {
        self.scales.unwrap_or_else(|| self.network.natural_scales())
    }

    /// Scales applied to the Newton unknowns.
    pub fn variable_scales(&self) -> Scales {
        if self.options.scale_variables {
            self.reference_scales()
        } else {
            Scales::UNIT
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("invalid network: {}", .0)]
    InvalidNetwork(ValidationReport),
    #[error("invalid solver options {0:?}")]
    BadOptions(SolverOptions),
    #[error("Newton did not converge in {iterations} iterations (final scaled residual {final_residual:e})")]
    NonConvergence {
        iterations: usize,
        final_residual: f64,
        /// Scaled residual infinity norm before each iteration.
        trace: Vec<f64>,
    },
    #[error("singular Jacobian at iteration {iteration}")]
    SingularJacobian { iteration: usize },
    #[error("inconsistent block: {0}")]
    InconsistentBlock(String),
    #[error("closed-form solve needs exactly 2 junctions and 1 edge, got {junctions} and {edges}")]
    NotTwoNode { junctions: usize, edges: usize },
    #[error(transparent)]
    TreeFlow(#[from] TreeFlowError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Dimension(#[from] DimensionMismatch),
    #[error("block {block} (level {level}): {source}")]
    Block {
        block: BlockId,
        level: usize,
        #[source]
        source: Box<SolveError>,
    },
}

impl SolveError {
    /// Innermost error, skipping block annotations.
    pub fn root_cause(&self) -> &SolveError {
        match self {
            SolveError::Block { source, .. } => source.root_cause(),
            other => other,
        }
    }

    pub fn is_non_convergence(&self) -> bool {
        matches!(
            self.root_cause(),
            SolveError::NonConvergence { .. } | SolveError::SingularJacobian { .. }
        )
    }
}
