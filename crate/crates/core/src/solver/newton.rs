use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::network::Solution;
use crate::verify::verify_with_scales;

use super::jacobian::NewtonSystem;
use super::{linsolve, BlockProblem, SolveError};

/// Flat start: every potential at the largest-magnitude slack potential,
/// every flow at `flat_flow_init`.
fn flat_start(prob: &BlockProblem) -> (Vec<f64>, Vec<f64>) {
    let net = &prob.network;
    let pi0 = net
        .junctions()
        .iter()
        .filter_map(|j| j.slack_potential())
        .fold(0.0f64, |acc, p| if p.abs() > acc.abs() { p } else { acc });
    (
        vec![pi0; net.num_junctions()],
        vec![prob.options.flat_flow_init; net.num_edges()],
    )
}

/// Seeded random start: potentials uniform in `[0.5, 1.5]` times the
/// potential scale, flows uniform in `[-2, 2]` times the flow scale.
pub fn random_start(prob: &BlockProblem, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let s = prob.reference_scales();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net = &prob.network;
    let potentials = (0..net.num_junctions())
        .map(|_| rng.random_range(0.5..=1.5) * s.potential)
        .collect();
    let flows = (0..net.num_edges())
        .map(|_| rng.random_range(-2.0..=2.0) * s.flow)
        .collect();
    (potentials, flows)
}

/// Newton-Raphson from the given state.
pub fn solve_block_newton_from(
    prob: &BlockProblem,
    potentials: &[f64],
    flows: &[f64],
) -> Result<Solution, SolveError> {
    prob.options.check()?;
    let net = &prob.network;
    let opts = &prob.options;
    let reference = prob.reference_scales();
    let sys = NewtonSystem::for_problem(prob);
    let mut x = sys.pack(potentials, flows);
    let mut trace = Vec::new();

    let measure = |x: &[f64]| {
        let (p, f) = sys.unpack(x);
        let report = verify_with_scales(net, &p, &f, reference, opts.tol).expect("dimensions match by construction");
        (report, p, f)
    };

    for iteration in 0..=opts.max_iter {
        let (report, p, f) = measure(&x);
        trace.push(report.scaled_inf_norm);
        if report.passed {
            return Ok(Solution {
                potentials: p,
                flows: f,
                residual_inf_norm: report.inf_norm,
                scaled_residual_inf_norm: report.scaled_inf_norm,
                iterations_total: iteration,
            });
        }
        if iteration == opts.max_iter || !report.scaled_inf_norm.is_finite() {
            break;
        }
        let r = sys.residual(&x);
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let dx = linsolve::solve(&sys.jacobian(&x), &rhs).ok_or(SolveError::SingularJacobian { iteration })?;
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += opts.step_scale * di;
        }
    }
    Err(SolveError::NonConvergence {
        iterations: trace.len() - 1,
        final_residual: *trace.last().expect("at least one residual"),
        trace,
    })
}

/// Newton from the flat start, then from seeded random starts (seeds
/// `1..multi_start_seeds`) until one converges. The error of the flat start
/// is returned when all fail.
pub fn solve_block_newton(prob: &BlockProblem) -> Result<Solution, SolveError> {
    let (p, f) = flat_start(prob);
    let first = solve_block_newton_from(prob, &p, &f);
    if first.is_ok() {
        return first;
    }
    for seed in 1..prob.options.multi_start_seeds as u64 {
        let (p, f) = random_start(prob, seed);
        if let Ok(sol) = solve_block_newton_from(prob, &p, &f) {
            return Ok(sol);
        }
    }
    first
}

/// One Newton run per seed from [`random_start`].
pub fn multi_start_solutions(prob: &BlockProblem, seeds: &[u64]) -> Vec<Result<Solution, SolveError>> {
    seeds
        .iter()
        .map(|&seed| {
            let (p, f) = random_start(prob, seed);
            solve_block_newton_from(prob, &p, &f)
        })
        .collect()
}
