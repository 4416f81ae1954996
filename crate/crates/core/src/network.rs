//! Network data model and the per-equation residuals of the steady-state
//! flow system.
//!
//! Sign convention for injections: a positive injection `q` at a non-slack
//! junction is net *inflow consumed* at that junction (a withdrawal/demand):
//!
//! ```text
//! sum(flow on edges into j) - sum(flow on edges out of j) = q_j
//! ```
//!
//! Many gas datasets store supplies as positive numbers; those must be
//! negated on import.

use std::collections::HashMap;

use thiserror::Error;

/// Index of a junction inside its [`Network`].
pub type JunctionIdx = usize;
/// Index of an edge inside its [`Network`].
pub type EdgeIdx = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JunctionKind {
    /// Prescribed potential, unknown injection.
    Slack { potential: f64 },
    /// Prescribed injection (positive = withdrawal), unknown potential.
    NonSlack { injection: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Junction {
    pub id: String,
    pub kind: JunctionKind,
}

impl Junction {
    pub fn slack(id: impl Into<String>, potential: f64) -> Self {
        Self {
            id: id.into(),
            kind: JunctionKind::Slack { potential },
        }
    }

    pub fn non_slack(id: impl Into<String>, injection: f64) -> Self {
        Self {
            id: id.into(),
            kind: JunctionKind::NonSlack { injection },
        }
    }

    pub fn is_slack(&self) -> bool {
        matches!(self.kind, JunctionKind::Slack { .. })
    }

    pub fn slack_potential(&self) -> Option<f64> {
        match self.kind {
            JunctionKind::Slack { potential } => Some(potential),
            JunctionKind::NonSlack { .. } => None,
        }
    }

    pub fn injection(&self) -> Option<f64> {
        match self.kind {
            JunctionKind::Slack { .. } => None,
            JunctionKind::NonSlack { injection } => Some(injection),
        }
    }
}

/// Physics of a single edge: `gamma * pi_from - pi_to = g(f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element {
    /// `g(f) = alpha * f * |f|`, `gamma = 1`.
    Pipe { alpha: f64 },
    /// `g(f) = r * f`, `gamma = 1`.
    Linear { r: f64 },
    /// `g = 0` with a free potential multiplier (compressor or regulator).
    Ideal { gamma: f64 },
    /// `g(f) = c`, `gamma = 1` (constant-head pump).
    Offset { c: f64 },
}

impl Element {
    pub fn gamma(&self) -> f64 {
        match *self {
            Element::Ideal { gamma } => gamma,
            _ => 1.0,
        }
    }

    pub fn g(&self, f: f64) -> f64 {
        match *self {
            Element::Pipe { alpha } => alpha * f * f.abs(),
            Element::Linear { r } => r * f,
            Element::Ideal { .. } => 0.0,
            Element::Offset { c } => c,
        }
    }

    /// Exact derivative `dg/df` (no flooring).
    pub fn dg(&self, f: f64) -> f64 {
        match *self {
            Element::Pipe { alpha } => 2.0 * alpha * f.abs(),
            Element::Linear { r } => r,
            Element::Ideal { .. } | Element::Offset { .. } => 0.0,
        }
    }

    /// True when `g` does not depend on the flow. Such edges cannot fix
    /// their own flow, which is what the lossless-path and lossless-cycle
    /// conditions guard against.
    pub fn is_flow_insensitive(&self) -> bool {
        matches!(self, Element::Ideal { .. } | Element::Offset { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Element::Pipe { .. } => "pipe",
            Element::Linear { .. } => "linear",
            Element::Ideal { .. } => "ideal",
            Element::Offset { .. } => "offset",
        }
    }

    /// Solve `g(f) = drop` for `f` when `g` is invertible.
    pub fn invert(&self, drop: f64) -> Option<f64> {
        match *self {
            Element::Pipe { alpha } => Some(drop.signum() * (drop.abs() / alpha).sqrt()),
            Element::Linear { r } => Some(drop / r),
            Element::Ideal { .. } | Element::Offset { .. } => None,
        }
    }

    fn check(&self) -> Result<(), String> {
        let (name, v, positive) = match *self {
            Element::Pipe { alpha } => ("alpha", alpha, true),
            Element::Linear { r } => ("r", r, true),
            Element::Ideal { gamma } => ("gamma", gamma, true),
            Element::Offset { c } => ("c", c, false),
        };
        if !v.is_finite() || (positive && v <= 0.0) {
            return Err(format!("parameter `{name}` must be {}, got {v}", if positive { "a positive finite number" } else { "finite" }));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub from: JunctionIdx,
    pub to: JunctionIdx,
    pub element: Element,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("network has no junctions")]
    Empty,
    #[error("duplicate junction id `{0}`")]
    DuplicateJunction(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{edge}` references unknown junction `{junction}`")]
    UnknownJunction { edge: String, junction: String },
    #[error("edge `{0}` is a self-loop")]
    SelfLoop(String),
    #[error("edge `{edge}`: {message}")]
    BadParameter { edge: String, message: String },
    #[error("junction `{id}` has non-finite {field}")]
    NonFinite { id: String, field: &'static str },
    #[error("junction `{0}` is not a non-slack junction")]
    NotNonSlack(String),
    #[error("no flow given for edge `{0}`")]
    MissingFlow(String),
}

/// A directed multigraph of junctions and edge elements.
///
/// Immutable after construction; the constructor checks structural
/// well-formedness only (ids, endpoints, parameters). Physical assumptions
/// are checked separately by [`crate::validate_network`].
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    junctions: Vec<Junction>,
    edges: Vec<Edge>,
    junction_index: HashMap<String, JunctionIdx>,
    edge_index: HashMap<String, EdgeIdx>,
    incident: Vec<Vec<EdgeIdx>>,
}

impl Network {
    /// Build from junctions and `(id, from id, to id, element)` tuples.
    pub fn new(
        junctions: Vec<Junction>,
        edges: Vec<(String, String, String, Element)>,
    ) -> Result<Self, NetworkError> {
        let mut junction_index = HashMap::with_capacity(junctions.len());
        for (i, j) in junctions.iter().enumerate() {
            if junction_index.insert(j.id.clone(), i).is_some() {
                return Err(NetworkError::DuplicateJunction(j.id.clone()));
            }
        }
        let mut built = Vec::with_capacity(edges.len());
        for (id, from, to, element) in edges {
            let lookup = |name: &str| {
                junction_index
                    .get(name)
                    .copied()
                    .ok_or_else(|| NetworkError::UnknownJunction {
                        edge: id.clone(),
                        junction: name.to_string(),
                    })
            };
            let from = lookup(&from)?;
            let to = lookup(&to)?;
            built.push(Edge { id, from, to, element });
        }
        Self::from_indexed(junctions, built)
    }

    /// Build from edges whose endpoints are already junction indices.
    pub fn from_indexed(junctions: Vec<Junction>, edges: Vec<Edge>) -> Result<Self, NetworkError> {
        if junctions.is_empty() {
            return Err(NetworkError::Empty);
        }
        let mut junction_index = HashMap::with_capacity(junctions.len());
        for (i, j) in junctions.iter().enumerate() {
            let value = match j.kind {
                JunctionKind::Slack { potential } => ("potential", potential),
                JunctionKind::NonSlack { injection } => ("injection", injection),
            };
            if !value.1.is_finite() {
                return Err(NetworkError::NonFinite { id: j.id.clone(), field: value.0 });
            }
            if junction_index.insert(j.id.clone(), i).is_some() {
                return Err(NetworkError::DuplicateJunction(j.id.clone()));
            }
        }
        let mut edge_index = HashMap::with_capacity(edges.len());
        let mut incident = vec![Vec::new(); junctions.len()];
        for (k, e) in edges.iter().enumerate() {
            if edge_index.insert(e.id.clone(), k).is_some() {
                return Err(NetworkError::DuplicateEdge(e.id.clone()));
            }
            for end in [e.from, e.to] {
                if end >= junctions.len() {
                    return Err(NetworkError::UnknownJunction {
                        edge: e.id.clone(),
                        junction: format!("#{end}"),
                    });
                }
            }
            if e.from == e.to {
                return Err(NetworkError::SelfLoop(e.id.clone()));
            }
            e.element.check().map_err(|message| NetworkError::BadParameter {
                edge: e.id.clone(),
                message,
            })?;
            incident[e.from].push(k);
            incident[e.to].push(k);
        }
        Ok(Self {
            junctions,
            edges,
            junction_index,
            edge_index,
            incident,
        })
    }

    pub fn junctions(&self) -> &[Junction] {
        &self.junctions
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn junction(&self, j: JunctionIdx) -> &Junction {
        &self.junctions[j]
    }

    pub fn edge(&self, e: EdgeIdx) -> &Edge {
        &self.edges[e]
    }

    pub fn num_junctions(&self) -> usize {
        self.junctions.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn junction_idx(&self, id: &str) -> Option<JunctionIdx> {
        self.junction_index.get(id).copied()
    }

    pub fn edge_idx(&self, id: &str) -> Option<EdgeIdx> {
        self.edge_index.get(id).copied()
    }

    /// Edges touching junction `j`, in insertion order.
    pub fn incident_edges(&self, j: JunctionIdx) -> &[EdgeIdx] {
        &self.incident[j]
    }

    pub fn slack_junctions(&self) -> impl Iterator<Item = JunctionIdx> + '_ {
        (0..self.junctions.len()).filter(|&j| self.junctions[j].is_slack())
    }

    /// Number of connected components of the underlying undirected graph.
    pub fn connected_components(&self) -> Vec<Vec<JunctionIdx>> {
        let n = self.junctions.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &e in &self.incident[u] {
                    let v = self.other_end(e, u);
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    /// The endpoint of `e` that is not `u`.
    pub fn other_end(&self, e: EdgeIdx, u: JunctionIdx) -> JunctionIdx {
        let edge = &self.edges[e];
        if edge.from == u {
            edge.to
        } else {
            edge.from
        }
    }

    /// Largest slack potential magnitude and largest injection magnitude
    /// (floored at 1), used to nondimensionalize the flow system.
    pub fn natural_scales(&self) -> Scales {
        let mut potential: f64 = 0.0;
        let mut flow: f64 = 1.0;
        for j in &self.junctions {
            match j.kind {
                JunctionKind::Slack { potential: p } => potential = potential.max(p.abs()),
                JunctionKind::NonSlack { injection } => flow = flow.max(injection.abs()),
            }
        }
        Scales {
            potential: if potential > 0.0 { potential } else { 1.0 },
            flow,
        }
    }

    /// Copy of this network with the kind of some junctions replaced.
    pub fn with_junction_kinds(&self, kinds: &[(JunctionIdx, JunctionKind)]) -> Network {
        let mut out = self.clone();
        for &(j, kind) in kinds {
            out.junctions[j].kind = kind;
        }
        out
    }
}

/// Reference magnitudes for potentials and flows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales {
    pub potential: f64,
    pub flow: f64,
}

impl Scales {
    pub const UNIT: Scales = Scales {
        potential: 1.0,
        flow: 1.0,
    };
}

/// Nodal potentials and edge flows, indexed like the network they solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub potentials: Vec<f64>,
    pub flows: Vec<f64>,
    /// Unscaled residual infinity norm from [`crate::verify_solution`].
    pub residual_inf_norm: f64,
    /// Residual infinity norm in the network's natural scales.
    pub scaled_residual_inf_norm: f64,
    pub iterations_total: usize,
}

impl Solution {
    pub fn potential(&self, net: &Network, id: &str) -> Option<f64> {
        net.junction_idx(id).map(|j| self.potentials[j])
    }

    pub fn flow(&self, net: &Network, id: &str) -> Option<f64> {
        net.edge_idx(id).map(|e| self.flows[e])
    }
}

/// `gamma * pi_from - pi_to - g(f)` for one edge.
pub fn edge_residual(element: &Element, pi_from: f64, pi_to: f64, f: f64) -> f64 {
    element.gamma() * pi_from - pi_to - element.g(f)
}

/// Flow balance residual at a non-slack junction:
/// inflow - outflow - injection.
pub fn node_residual(net: &Network, j: JunctionIdx, flows: &HashMap<String, f64>) -> Result<f64, NetworkError> {
    let junction = net.junction(j);
    let q = junction
        .injection()
        .ok_or_else(|| NetworkError::NotNonSlack(junction.id.clone()))?;
    let mut net_in = 0.0;
    for &e in net.incident_edges(j) {
        let edge = net.edge(e);
        let f = *flows
            .get(&edge.id)
            .ok_or_else(|| NetworkError::MissingFlow(edge.id.clone()))?;
        if edge.to == j {
            net_in += f;
        } else {
            net_in -= f;
        }
    }
    Ok(net_in - q)
}

/// Net inflow at `j` given a flow vector aligned with `net.edges()`.
pub(crate) fn net_inflow(net: &Network, j: JunctionIdx, flows: &[f64]) -> f64 {
    net.incident_edges(j)
        .iter()
        .map(|&e| if net.edge(e).to == j { flows[e] } else { -flows[e] })
        .sum()
}
