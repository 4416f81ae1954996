use std::fmt;

use crate::network::{EdgeIdx, JunctionIdx, Network};

/// One violated modelling assumption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The network is not connected (as an undirected graph).
    Disconnected { components: usize },
    /// No slack junction (A1).
    NoSlack,
    /// Two slack junctions joined by a path of flow-insensitive edges (A2).
    LosslessSlackPath { first: JunctionIdx, second: JunctionIdx },
    /// A cycle made only of flow-insensitive edges (A3); `edge` closes it.
    LosslessCycle { edge: EdgeIdx },
}

impl Violation {
    pub fn code(&self) -> &'static str {
        match self {
            Violation::Disconnected { .. } => "disconnected",
            Violation::NoSlack => "A1",
            Violation::LosslessSlackPath { .. } => "A2",
            Violation::LosslessCycle { .. } => "A3",
        }
    }

    pub fn describe(&self, net: &Network) -> String {
        match *self {
            Violation::Disconnected { components } => {
                format!("network is disconnected ({components} components)")
            }
            Violation::NoSlack => "no slack junction".to_string(),
            Violation::LosslessSlackPath { first, second } => format!(
                "slack junctions `{}` and `{}` are joined by a path with no flow-dependent edge",
                net.junction(first).id,
                net.junction(second).id
            ),
            Violation::LosslessCycle { edge } => format!(
                "edge `{}` closes a cycle with no flow-dependent edge",
                net.edge(edge).id
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn render(&self, net: &Network) -> String {
        let mut out = String::new();
        for v in &self.violations {
            out.push_str(&format!("[{}] {}\n", v.code(), v.describe(net)));
        }
        out
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        let codes: Vec<_> = self.violations.iter().map(|v| v.code()).collect();
        write!(f, "invalid: {}", codes.join(", "))
    }
}

pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Check connectivity and assumptions A1-A3.
///
/// A2 and A3 are checked on the subgraph of flow-insensitive edges: A3
/// holds iff that subgraph is a forest, A2 iff no tree of that forest holds
/// two slack junctions.
pub fn validate_network(net: &Network) -> ValidationReport {
    let mut violations = Vec::new();
    let components = net.connected_components().len();
    if components > 1 {
        violations.push(Violation::Disconnected { components });
    }
    if net.slack_junctions().next().is_none() {
        violations.push(Violation::NoSlack);
    }

    let mut sets = DisjointSets::new(net.num_junctions());
    for (k, e) in net.edges().iter().enumerate() {
        if e.element.is_flow_insensitive() && !sets.union(e.from, e.to) {
            violations.push(Violation::LosslessCycle { edge: k });
        }
    }
    let mut first_slack_in_set: Vec<Option<JunctionIdx>> = vec![None; net.num_junctions()];
    for s in net.slack_junctions() {
        let root = sets.find(s);
        match first_slack_in_set[root] {
            Some(first) => violations.push(Violation::LosslessSlackPath { first, second: s }),
            None => first_slack_in_set[root] = Some(s),
        }
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Element, Junction};

    fn e(id: &str, a: &str, b: &str, el: Element) -> (String, String, String, Element) {
        (id.into(), a.into(), b.into(), el)
    }

    #[test]
    fn all_pipes_single_slack_is_valid() {
        let net = Network::new(
            vec![Junction::slack("a", 1.0), Junction::non_slack("b", 1.0), Junction::non_slack("c", 1.0)],
            vec![
                e("1", "a", "b", Element::Pipe { alpha: 1.0 }),
                e("2", "b", "c", Element::Pipe { alpha: 1.0 }),
                e("3", "c", "a", Element::Pipe { alpha: 1.0 }),
            ],
        )
        .unwrap();
        assert!(validate_network(&net).is_valid());
    }

    #[test]
    fn two_slacks_joined_by_compressor() {
        let net = Network::new(
            vec![Junction::slack("a", 1.0), Junction::slack("b", 2.0)],
            vec![e("k", "a", "b", Element::Ideal { gamma: 2.0 })],
        )
        .unwrap();
        let report = validate_network(&net);
        assert_eq!(report.violations, vec![Violation::LosslessSlackPath { first: 0, second: 1 }]);
    }

    #[test]
    fn ideal_triangle_is_a_lossless_cycle() {
        let net = Network::new(
            vec![Junction::slack("a", 1.0), Junction::non_slack("b", 0.0), Junction::non_slack("c", 0.0)],
            vec![
                e("1", "a", "b", Element::Ideal { gamma: 1.0 }),
                e("2", "b", "c", Element::Ideal { gamma: 1.0 }),
                e("3", "c", "a", Element::Ideal { gamma: 1.0 }),
            ],
        )
        .unwrap();
        let report = validate_network(&net);
        assert_eq!(report.violations, vec![Violation::LosslessCycle { edge: 2 }]);
    }

    #[test]
    fn no_slack_and_disconnected() {
        let net = Network::new(
            vec![Junction::non_slack("a", 1.0), Junction::non_slack("b", 0.0), Junction::non_slack("c", 0.0)],
            vec![e("1", "a", "b", Element::Pipe { alpha: 1.0 })],
        )
        .unwrap();
        let codes: Vec<_> = validate_network(&net).violations.iter().map(|v| v.code()).collect();
        assert_eq!(codes, vec!["disconnected", "A1"]);
    }

    #[test]
    fn slacks_separated_by_pipe_are_fine() {
        let net = Network::new(
            vec![Junction::slack("a", 1.0), Junction::non_slack("m", 0.0), Junction::slack("b", 2.0)],
            vec![
                e("k", "a", "m", Element::Ideal { gamma: 1.5 }),
                e("p", "m", "b", Element::Pipe { alpha: 1.0 }),
            ],
        )
        .unwrap();
        assert!(validate_network(&net).is_valid());
    }
}
