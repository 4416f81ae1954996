//! JSON documents for networks and solutions.
//!
//! Network document:
//!
//! ```json
//! {
//!   "version": "1",
//!   "name": "series",
//!   "nodes": [
//!     {"id": "a", "slack": true, "potential": 100.0},
//!     {"id": "b", "slack": false, "injection": 2.0}
//!   ],
//!   "edges": [{"id": "ab", "from": "a", "to": "b", "kind": "pipe", "alpha": 1.0}]
//! }
//! ```
//!
//! `kind` is one of `pipe` (`alpha`), `linear` (`r`), `ideal` (`gamma`,
//! default 1) or `offset` (`c`). A non-slack node without `injection` has
//! zero injection. Positive injections are withdrawals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hierarchical::SolveReport;
use crate::network::{Element, Junction, JunctionKind, Network, NetworkError, Solution};

pub const DOCUMENT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: String,
    pub slack: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub injection: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: String,
    pub from: String,
    pub to: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDocument {
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DocumentError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{location}: {message}")]
    Field { location: String, message: String },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

fn field_err(location: String, message: impl Into<String>) -> DocumentError {
    DocumentError::Field {
        location,
        message: message.into(),
    }
}

impl NetworkDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        serde_json::from_str(text).map_err(|e| DocumentError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    pub fn from_network(net: &Network, name: Option<&str>) -> Self {
        let nodes = net
            .junctions()
            .iter()
            .map(|j| match j.kind {
                JunctionKind::Slack { potential } => NodeDoc {
                    id: j.id.clone(),
                    slack: true,
                    potential: Some(potential),
                    injection: None,
                },
                JunctionKind::NonSlack { injection } => NodeDoc {
                    id: j.id.clone(),
                    slack: false,
                    potential: None,
                    injection: Some(injection),
                },
            })
            .collect();
        let edges = net
            .edges()
            .iter()
            .map(|e| {
                let mut doc = EdgeDoc {
                    id: e.id.clone(),
                    from: net.junction(e.from).id.clone(),
                    to: net.junction(e.to).id.clone(),
                    kind: e.element.kind_name().to_string(),
                    alpha: None,
                    r: None,
                    gamma: None,
                    c: None,
                };
                match e.element {
                    Element::Pipe { alpha } => doc.alpha = Some(alpha),
                    Element::Linear { r } => doc.r = Some(r),
                    Element::Ideal { gamma } => doc.gamma = Some(gamma),
                    Element::Offset { c } => doc.c = Some(c),
                }
                doc
            })
            .collect();
        Self {
            version: DOCUMENT_VERSION.to_string(),
            name: name.map(str::to_string),
            nodes,
            edges,
        }
    }

    pub fn to_network(&self) -> Result<Network, DocumentError> {
        if self.version != DOCUMENT_VERSION {
            return Err(field_err("version".into(), format!("unsupported version `{}`", self.version)));
        }
        let mut junctions = Vec::with_capacity(self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            let at = |field: &str| format!("nodes[{i}] (`{}`).{field}", n.id);
            let kind = if n.slack {
                if n.injection.is_some() {
                    return Err(field_err(at("injection"), "slack nodes take no injection"));
                }
                let potential = n.potential.ok_or_else(|| field_err(at("potential"), "slack node needs a potential"))?;
                JunctionKind::Slack { potential }
            } else {
                if n.potential.is_some() {
                    return Err(field_err(at("potential"), "only slack nodes take a potential"));
                }
                JunctionKind::NonSlack {
                    injection: n.injection.unwrap_or(0.0),
                }
            };
            junctions.push(Junction { id: n.id.clone(), kind });
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for (k, e) in self.edges.iter().enumerate() {
            let at = |field: &str| format!("edges[{k}] (`{}`).{field}", e.id);
            let params = [("alpha", e.alpha), ("r", e.r), ("gamma", e.gamma), ("c", e.c)];
            let (element, allowed) = match e.kind.as_str() {
                "pipe" => (
                    e.alpha.map(|alpha| Element::Pipe { alpha }).ok_or_else(|| field_err(at("alpha"), "pipe needs `alpha`"))?,
                    "alpha",
                ),
                "linear" => (
                    e.r.map(|r| Element::Linear { r }).ok_or_else(|| field_err(at("r"), "linear edge needs `r`"))?,
                    "r",
                ),
                "ideal" => (
                    Element::Ideal {
                        gamma: e.gamma.unwrap_or(1.0),
                    },
                    "gamma",
                ),
                "offset" => (
                    e.c.map(|c| Element::Offset { c }).ok_or_else(|| field_err(at("c"), "offset edge needs `c`"))?,
                    "c",
                ),
                other => {
                    return Err(field_err(
                        at("kind"),
                        format!("unknown kind `{other}` (expected pipe, linear, ideal or offset)"),
                    ))
                }
            };
            if let Some((name, _)) = params.iter().find(|(name, v)| v.is_some() && *name != allowed) {
                return Err(field_err(at(name), format!("`{name}` does not apply to a {} edge", e.kind)));
            }
            edges.push((e.id.clone(), e.from.clone(), e.to.clone(), element));
        }
        Ok(Network::new(junctions, edges)?)
    }
}

/// Parse a network document straight to a [`Network`].
pub fn parse_network(text: &str) -> Result<(Network, Option<String>), DocumentError> {
    let doc = NetworkDocument::parse(text)?;
    Ok((doc.to_network()?, doc.name))
}

/// Potentials and flows keyed by id (sorted), plus the solve report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionDocument {
    pub potentials: BTreeMap<String, f64>,
    pub flows: BTreeMap<String, f64>,
    pub residual_inf_norm: f64,
    pub scaled_residual_inf_norm: f64,
    pub iterations_total: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<SolveReport>,
}

impl SolutionDocument {
    pub fn new(net: &Network, sol: &Solution, report: Option<SolveReport>) -> Self {
        Self {
            potentials: net.junctions().iter().map(|j| j.id.clone()).zip(sol.potentials.iter().copied()).collect(),
            flows: net.edges().iter().map(|e| e.id.clone()).zip(sol.flows.iter().copied()).collect(),
            residual_inf_norm: sol.residual_inf_norm,
            scaled_residual_inf_norm: sol.scaled_residual_inf_norm,
            iterations_total: sol.iterations_total,
            report,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solutions serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SERIES: &str = r#"{
      "version": "1",
      "name": "series",
      "nodes": [
        {"id": "a", "slack": true, "potential": 100},
        {"id": "b", "slack": false},
        {"id": "c", "slack": false, "injection": 2}
      ],
      "edges": [
        {"id": "ab", "from": "a", "to": "b", "kind": "pipe", "alpha": 1},
        {"id": "bc", "from": "b", "to": "c", "kind": "pipe", "alpha": 1}
      ]
    }"#;

    #[test]
    fn parses_series() {
        let (net, name) = parse_network(SERIES).unwrap();
        assert_eq!(name.as_deref(), Some("series"));
        assert_eq!(net.num_junctions(), 3);
        assert_eq!(net.junction(1).injection(), Some(0.0));
        assert_eq!(net.edge(1).element, Element::Pipe { alpha: 1.0 });
    }

    #[test]
    fn unknown_endpoint_names_the_edge() {
        let text = SERIES.replace(r#""to": "c""#, r#""to": "zz""#);
        let err = parse_network(&text).unwrap_err();
        assert_eq!(
            err,
            DocumentError::Network(NetworkError::UnknownJunction {
                edge: "bc".into(),
                junction: "zz".into()
            })
        );
    }

    #[test]
    fn syntax_errors_have_a_location() {
        let err = parse_network("{\n  \"version\": \"1\",\n  \"nodes\": [,]\n}").unwrap_err();
        assert!(matches!(err, DocumentError::Syntax { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn field_errors_have_a_location() {
        let text = SERIES.replacen(r#""alpha": 1"#, r#""r": 1"#, 1);
        match parse_network(&text).unwrap_err() {
            DocumentError::Field { location, .. } => assert!(location.starts_with("edges[0]"), "{location}"),
            other => panic!("{other:?}"),
        }
    }

    fn arb_element() -> impl Strategy<Value = Element> {
        prop_oneof![
            (0.01f64..10.0).prop_map(|alpha| Element::Pipe { alpha }),
            (0.01f64..10.0).prop_map(|r| Element::Linear { r }),
            (0.5f64..2.0).prop_map(|gamma| Element::Ideal { gamma }),
            (-5.0f64..5.0).prop_map(|c| Element::Offset { c }),
        ]
    }

    proptest! {
        #[test]
        fn round_trip(
            kinds in prop::collection::vec(prop::option::of(-1e3f64..1e3), 2..12),
            elems in prop::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>(), arb_element()), 0..20),
        ) {
            let n = kinds.len();
            let junctions: Vec<Junction> = kinds.iter().enumerate().map(|(i, k)| match k {
                Some(p) if i % 2 == 0 => Junction::slack(format!("j{i}"), *p),
                Some(q) => Junction::non_slack(format!("j{i}"), *q),
                None => Junction::non_slack(format!("j{i}"), 0.0),
            }).collect();
            let edges: Vec<(String, String, String, Element)> = elems.iter().enumerate()
                .filter_map(|(k, (a, b, el))| {
                    let (a, b) = (a.index(n), b.index(n));
                    (a != b).then(|| (format!("e{k}"), format!("j{a}"), format!("j{b}"), *el))
                })
                .collect();
            let net = Network::new(junctions, edges).unwrap();
            let doc = NetworkDocument::from_network(&net, Some("rt"));
            let text = doc.to_json();
            let back = NetworkDocument::parse(&text).unwrap();
            prop_assert_eq!(&back, &doc);
            prop_assert_eq!(back.to_network().unwrap(), net);
        }
    }
}
