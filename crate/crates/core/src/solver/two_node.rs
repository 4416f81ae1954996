use crate::network::Solution;
use crate::verify::verify_with_scales;

use super::{BlockProblem, SolveError};

/// Direct substitution on a block with two junctions and one edge.
///
/// With the slack at one end the flow is fixed by the balance at the other
/// end and the remaining potential follows from the edge equation. With
/// slacks at both ends the flow comes from inverting `g`.
pub fn solve_two_node_block(prob: &BlockProblem) -> Result<Solution, SolveError> {
    let net = &prob.network;
    if net.num_junctions() != 2 || net.num_edges() != 1 {
        return Err(SolveError::NotTwoNode {
            junctions: net.num_junctions(),
            edges: net.num_edges(),
        });
    }
    let e = net.edge(0);
    let el = e.element;
    let gamma = el.gamma();
    let (from, to) = (net.junction(e.from), net.junction(e.to));
    let mut potentials = vec![0.0; 2];
    let flow = match (from.slack_potential(), to.slack_potential()) {
        (Some(pf), None) => {
            let f = to.injection().expect("non-slack");
            potentials[e.from] = pf;
            potentials[e.to] = gamma * pf - el.g(f);
            f
        }
        (None, Some(pt)) => {
            let f = -from.injection().expect("non-slack");
            potentials[e.to] = pt;
            potentials[e.from] = (pt + el.g(f)) / gamma;
            f
        }
        (Some(pf), Some(pt)) => {
            potentials[e.from] = pf;
            potentials[e.to] = pt;
            el.invert(gamma * pf - pt).ok_or_else(|| {
                SolveError::InconsistentBlock(format!(
                    "{} edge `{}` joins two slack junctions",
                    el.kind_name(),
                    e.id
                ))
            })?
        }
        (None, None) => {
            return Err(SolveError::InconsistentBlock(format!(
                "edge `{}` has no slack end",
                e.id
            )))
        }
    };
    let flows = vec![flow];
    let report = verify_with_scales(net, &potentials, &flows, prob.reference_scales(), prob.options.tol)?;
    Ok(Solution {
        potentials,
        flows,
        residual_inf_norm: report.inf_norm,
        scaled_residual_inf_norm: report.scaled_inf_norm,
        iterations_total: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Element, Junction, Network};
    use crate::solver::SolverOptions;

    fn prob(a: Junction, b: Junction, el: Element) -> BlockProblem {
        let net = Network::new(vec![a, b], vec![("e".into(), "a".into(), "b".into(), el)]).unwrap();
        BlockProblem::new(net, SolverOptions::default())
    }

    #[test]
    fn slack_at_from_end() {
        let p = prob(Junction::slack("a", 100.0), Junction::non_slack("b", 2.0), Element::Pipe { alpha: 1.0 });
        let s = solve_two_node_block(&p).unwrap();
        assert_eq!(s.flows, vec![2.0]);
        assert_eq!(s.potentials, vec![100.0, 96.0]);
    }

    #[test]
    fn slack_at_to_end() {
        let p = prob(Junction::non_slack("a", -3.0), Junction::slack("b", 10.0), Element::Ideal { gamma: 2.0 });
        let s = solve_two_node_block(&p).unwrap();
        assert_eq!(s.flows, vec![3.0]);
        assert_eq!(s.potentials, vec![5.0, 10.0]);
    }

    #[test]
    fn both_ends_slack() {
        let p = prob(Junction::slack("a", 10.0), Junction::slack("b", 1.0), Element::Pipe { alpha: 1.0 });
        assert_eq!(solve_two_node_block(&p).unwrap().flows, vec![3.0]);
        let p = prob(Junction::slack("a", 1.0), Junction::slack("b", 9.0), Element::Linear { r: 4.0 });
        assert_eq!(solve_two_node_block(&p).unwrap().flows, vec![-2.0]);
        let p = prob(Junction::slack("a", 1.0), Junction::slack("b", 1.0), Element::Offset { c: 0.0 });
        assert!(matches!(solve_two_node_block(&p), Err(SolveError::InconsistentBlock(_))));
    }

    #[test]
    fn rejects_larger_blocks() {
        let net = Network::new(
            vec![Junction::slack("a", 1.0), Junction::non_slack("b", 0.0), Junction::non_slack("c", 0.0)],
            vec![
                ("x".into(), "a".into(), "b".into(), Element::Linear { r: 1.0 }),
                ("y".into(), "b".into(), "c".into(), Element::Linear { r: 1.0 }),
            ],
        )
        .unwrap();
        let p = BlockProblem::new(net, SolverOptions::default());
        assert!(matches!(solve_two_node_block(&p), Err(SolveError::NotTwoNode { .. })));
    }
}
