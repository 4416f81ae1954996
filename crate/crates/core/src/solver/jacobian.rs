use crate::network::{Element, JunctionKind, Network, Scales, Solution};

use super::BlockProblem;

/// Triplet form of a square sparse matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseJacobian {
    pub nrows: usize,
    pub ncols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseJacobian {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries
            .iter()
            .filter(|&&(r, c, _)| r == row && c == col)
            .map(|&(_, _, v)| v)
            .sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.ncols]; self.nrows];
        for &(r, c, v) in &self.entries {
            m[r][c] += v;
        }
        m
    }
}

/// The flow system in scaled variables.
///
/// Unknowns: potentials (junction order) then flows (edge order), divided
/// by the potential and flow scales. Rows: one per edge, one per non-slack
/// balance, one per slack pin, each divided by its equation's scale.
pub struct NewtonSystem<'a> {
    net: &'a Network,
    scales: Scales,
    deriv_floor: f64,
    balance_rows: Vec<usize>,
    slack_rows: Vec<usize>,
}

impl<'a> NewtonSystem<'a> {
    pub fn new(net: &'a Network, scales: Scales, deriv_floor: f64) -> Self {
        let (slack, balance): (Vec<usize>, Vec<usize>) =
            (0..net.num_junctions()).partition(|&j| net.junction(j).is_slack());
        Self {
            net,
            scales,
            deriv_floor,
            balance_rows: balance,
            slack_rows: slack,
        }
    }

    pub fn for_problem(prob: &'a BlockProblem) -> Self {
        Self::new(&prob.network, prob.variable_scales(), prob.options.deriv_floor)
    }

    pub fn dim(&self) -> usize {
        self.net.num_junctions() + self.net.num_edges()
    }

    pub fn pack(&self, potentials: &[f64], flows: &[f64]) -> Vec<f64> {
        potentials
            .iter()
            .map(|p| p / self.scales.potential)
            .chain(flows.iter().map(|f| f / self.scales.flow))
            .collect()
    }

    pub fn unpack(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.net.num_junctions();
        (
            x[..n].iter().map(|p| p * self.scales.potential).collect(),
            x[n..].iter().map(|f| f * self.scales.flow).collect(),
        )
    }

    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let n = self.net.num_junctions();
        let (sp, sf) = (self.scales.potential, self.scales.flow);
        let mut out = Vec::with_capacity(self.dim());
        for (k, e) in self.net.edges().iter().enumerate() {
            let f = x[n + k] * sf;
            out.push(e.element.gamma() * x[e.from] - x[e.to] - e.element.g(f) / sp);
        }
        for &j in &self.balance_rows {
            let q = self.net.junction(j).injection().expect("balance rows are non-slack");
            let inflow: f64 = self
                .net
                .incident_edges(j)
                .iter()
                .map(|&e| if self.net.edge(e).to == j { x[n + e] } else { -x[n + e] })
                .sum();
            out.push(inflow - q / sf);
        }
        for &j in &self.slack_rows {
            let JunctionKind::Slack { potential } = self.net.junction(j).kind else {
                unreachable!("slack rows are slack")
            };
            out.push(x[j] - potential / sp);
        }
        out
    }

    /// Jacobian of [`Self::residual`], with pipe slopes floored at
    /// `deriv_floor` (in scaled units).
    pub fn jacobian(&self, x: &[f64]) -> SparseJacobian {
        let n = self.net.num_junctions();
        let m = self.net.num_edges();
        let (sp, sf) = (self.scales.potential, self.scales.flow);
        let mut entries = Vec::with_capacity(3 * m + 2 * m + n);
        for (k, e) in self.net.edges().iter().enumerate() {
            entries.push((k, e.from, e.element.gamma()));
            entries.push((k, e.to, -1.0));
            let slope = e.element.dg(x[n + k] * sf) * sf / sp;
            match e.element {
                Element::Pipe { .. } => entries.push((k, n + k, -slope.max(self.deriv_floor))),
                Element::Linear { .. } => entries.push((k, n + k, -slope)),
                Element::Ideal { .. } | Element::Offset { .. } => {}
            }
        }
        for (i, &j) in self.balance_rows.iter().enumerate() {
            for &e in self.net.incident_edges(j) {
                let sign = if self.net.edge(e).to == j { 1.0 } else { -1.0 };
                entries.push((m + i, n + e, sign));
            }
        }
        let offset = m + self.balance_rows.len();
        for (i, &j) in self.slack_rows.iter().enumerate() {
            entries.push((offset + i, j, 1.0));
        }
        SparseJacobian {
            nrows: self.dim(),
            ncols: self.dim(),
            entries,
        }
    }
}

/// Jacobian at `state` in the problem's scaled variables (identical to the
/// unscaled Jacobian when `scale_variables` is off).
pub fn assemble_jacobian(prob: &BlockProblem, state: &Solution) -> SparseJacobian {
    let sys = NewtonSystem::for_problem(prob);
    sys.jacobian(&sys.pack(&state.potentials, &state.flows))
}
