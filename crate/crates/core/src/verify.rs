use serde::Serialize;
use thiserror::Error;

use crate::network::{edge_residual, net_inflow, JunctionIdx, JunctionKind, Network, Scales, Solution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("solution has {potentials} potentials and {flows} flows, network has {junctions} junctions and {edges} edges")]
pub struct DimensionMismatch {
    pub potentials: usize,
    pub flows: usize,
    pub junctions: usize,
    pub edges: usize,
}

/// Per-equation residuals of a candidate solution, in the network's own
/// (unscaled) units.
///
/// `passed` compares every residual against `tol` times the scale of its
/// equation: the potential scale for edge and slack equations, the flow
/// scale for balance equations. `scaled_inf_norm` is the largest such ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub edge_residuals: Vec<f64>,
    pub balance_residuals: Vec<(JunctionIdx, f64)>,
    pub slack_residuals: Vec<(JunctionIdx, f64)>,
    pub inf_norm: f64,
    pub scaled_inf_norm: f64,
    pub tol: f64,
    pub passed: bool,
}

pub fn verify_solution(net: &Network, sol: &Solution, tol: f64) -> Result<VerificationReport, DimensionMismatch> {
    verify_with_scales(net, &sol.potentials, &sol.flows, net.natural_scales(), tol)
}

pub(crate) fn verify_with_scales(
    net: &Network,
    potentials: &[f64],
    flows: &[f64],
    scales: Scales,
    tol: f64,
) -> Result<VerificationReport, DimensionMismatch> {
    if potentials.len() != net.num_junctions() || flows.len() != net.num_edges() {
        return Err(DimensionMismatch {
            potentials: potentials.len(),
            flows: flows.len(),
            junctions: net.num_junctions(),
            edges: net.num_edges(),
        });
    }
    let edge_residuals: Vec<f64> = net
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| edge_residual(&e.element, potentials[e.from], potentials[e.to], flows[k]))
        .collect();
    let mut balance_residuals = Vec::new();
    let mut slack_residuals = Vec::new();
    for (j, junction) in net.junctions().iter().enumerate() {
        match junction.kind {
            JunctionKind::NonSlack { injection } => {
                balance_residuals.push((j, net_inflow(net, j, flows) - injection))
            }
            JunctionKind::Slack { potential } => slack_residuals.push((j, potentials[j] - potential)),
        }
    }

    let mut inf_norm: f64 = 0.0;
    let mut scaled: f64 = 0.0;
    let mut take = |r: f64, scale: f64| {
        // NaN must not compare as converged
        let r = if r.is_nan() { f64::INFINITY } else { r.abs() };
        inf_norm = inf_norm.max(r);
        scaled = scaled.max(r / scale);
    };
    edge_residuals.iter().for_each(|&r| take(r, scales.potential));
    slack_residuals.iter().for_each(|&(_, r)| take(r, scales.potential));
    balance_residuals.iter().for_each(|&(_, r)| take(r, scales.flow));

    Ok(VerificationReport {
        edge_residuals,
        balance_residuals,
        slack_residuals,
        inf_norm,
        scaled_inf_norm: scaled,
        tol,
        passed: scaled < tol,
    })
}
