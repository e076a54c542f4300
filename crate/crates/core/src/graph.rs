//! The AMR graph model.
//!
//! An [`AmrGraph`] is a rooted, directed, edge-labeled graph. Variable nodes
//! carry a concept (`want-01`, `boy`); constant nodes carry a literal (`-`,
//! `"Paris"`, `42`) and never have outgoing edges. Edge order is the order in
//! which edges were added and is significant: PENMAN serialization and
//! linearization both walk children in that order.
//!
//! Variable names are kept as given but carry no meaning; graph equality is
//! isomorphism (see [`crate::smatch::isomorphic`]).

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Variable,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    /// Concept label for variables, the literal (quotes included) for constants.
    pub concept: String,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub src: String,
    /// Relation label including the leading `:`.
    pub label: String,
    pub tgt: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("root `{0}` is not a variable node of the graph")]
    BadRoot(String),
    #[error("edge endpoint `{0}` is not a node of the graph")]
    UnknownNode(String),
    #[error("relation label `{0}` must start with `:`")]
    BadLabel(String),
    #[error("constant node `{0}` has an outgoing edge")]
    ConstantSource(String),
    #[error("node `{0}` is not reachable from the root")]
    Unreachable(String),
    #[error("invalid {what} `{value}`")]
    BadSymbol { what: &'static str, value: String },
}

/// `# ::key value` comment lines preceding a PENMAN expression.
///
/// Lines are kept verbatim so they round-trip; lookups parse them lazily.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Metadata {
    lines: Vec<String>,
}

impl Metadata {
    pub fn from_lines<I, S>(lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Metadata { lines: lines.into_iter().map(Into::into).collect() }
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Value of the first `::key` field, e.g. `get("snt")`.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find_map(|line| meta_fields(line).find(|(k, _)| *k == key).map(|(_, v)| v))
    }

    pub fn push(&mut self, key: &str, value: &str) {
        self.lines.push(format!("# ::{key} {value}"));
    }
}

/// Splits `# ::id a ::date b` into `[("id", "a"), ("date", "b")]`.
fn meta_fields(line: &str) -> impl Iterator<Item = (&str, &str)> {
    let body = line.trim_start_matches('#');
    let mut starts = Vec::new();
    let bytes = body.as_bytes();
    for i in 0..bytes.len().saturating_sub(1) {
        if bytes[i] == b':' && bytes[i + 1] == b':' && (i == 0 || bytes[i - 1].is_ascii_whitespace()) {
            starts.push(i);
        }
    }
    let ends: Vec<usize> = starts.iter().skip(1).copied().chain(std::iter::once(body.len())).collect();
    starts.into_iter().zip(ends).map(move |(s, e)| {
        let field = body[s + 2..e].trim();
        match field.split_once(char::is_whitespace) {
            Some((k, v)) => (k, v.trim()),
            None => (field, ""),
        }
    })
}

/// A validated AMR graph. Immutable once built.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct AmrGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    root: String,
    metadata: Metadata,
    index: HashMap<String, usize>,
    out_edges: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    root: String,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    #[serde(default, skip_serializing_if = "Metadata::is_empty")]
    metadata: Metadata,
}

impl TryFrom<RawGraph> for AmrGraph {
    type Error = GraphError;

    fn try_from(raw: RawGraph) -> Result<Self, GraphError> {
        AmrGraph::new(raw.nodes, raw.edges, raw.root).map(|g| g.with_metadata(raw.metadata))
    }
}

impl From<AmrGraph> for RawGraph {
    fn from(g: AmrGraph) -> Self {
        RawGraph { root: g.root, nodes: g.nodes, edges: g.edges, metadata: g.metadata }
    }
}

impl PartialEq for AmrGraph {
    /// Structural equality including variable names. Use
    /// [`crate::smatch::isomorphic`] for graph equality.
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges && self.root == other.root
    }
}

impl AmrGraph {
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>, root: impl Into<String>) -> Result<Self, GraphError> {
        let root = root.into();
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateNode(n.id.clone()));
            }
        }
        match index.get(&root) {
            Some(&i) if nodes[i].kind == NodeKind::Variable => {}
            _ => return Err(GraphError::BadRoot(root)),
        }
        let variables: HashSet<&str> =
            nodes.iter().filter(|n| n.kind == NodeKind::Variable).map(|n| n.id.as_str()).collect();
        for n in &nodes {
            match n.kind {
                NodeKind::Variable => {
                    if !is_symbol(&n.id) || n.id.starts_with('#') {
                        return Err(GraphError::BadSymbol { what: "variable", value: n.id.clone() });
                    }
                    if !is_symbol(&n.concept) && !is_quoted(&n.concept) {
                        return Err(GraphError::BadSymbol { what: "concept", value: n.concept.clone() });
                    }
                }
                NodeKind::Constant => {
                    let ok = is_quoted(&n.concept) || (is_symbol(&n.concept) && !variables.contains(n.concept.as_str()));
                    if !ok {
                        return Err(GraphError::BadSymbol { what: "constant", value: n.concept.clone() });
                    }
                }
            }
        }

        let mut out_edges = vec![Vec::new(); nodes.len()];
        for (ei, e) in edges.iter().enumerate() {
            if e.label.len() < 2 || !e.label.starts_with(':') || e.label.chars().any(|c| c.is_whitespace() || c == '(' || c == ')') {
                return Err(GraphError::BadLabel(e.label.clone()));
            }
            let s = *index.get(&e.src).ok_or_else(|| GraphError::UnknownNode(e.src.clone()))?;
            if !index.contains_key(&e.tgt) {
                return Err(GraphError::UnknownNode(e.tgt.clone()));
            }
            if nodes[s].kind == NodeKind::Constant {
                return Err(GraphError::ConstantSource(e.src.clone()));
            }
            out_edges[s].push(ei);
        }

        let mut seen = vec![false; nodes.len()];
        let mut queue = VecDeque::from([index[&root]]);
        seen[index[&root]] = true;
        while let Some(i) = queue.pop_front() {
            for &ei in &out_edges[i] {
                let t = index[&edges[ei].tgt];
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(GraphError::Unreachable(nodes[i].id.clone()));
        }

        Ok(AmrGraph { nodes, edges, root, metadata: Metadata::default(), index, out_edges })
    }

    pub fn with_metadata(mut self, metadata: Metadata) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn root_node(&self) -> &Node {
        &self.nodes[self.index[&self.root]]
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn variables(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Variable)
    }

    /// Outgoing edges of `id` in insertion order.
    pub fn edges_from(&self, id: &str) -> impl Iterator<Item = &Edge> {
        let list: &[usize] = self.index.get(id).map(|&i| self.out_edges[i].as_slice()).unwrap_or(&[]);
        list.iter().map(move |&ei| &self.edges[ei])
    }

    /// Smatch decomposition: one instance triple per variable, one
    /// attribute or relation triple per edge, plus the `TOP` attribute.
    pub fn to_triples(&self) -> Vec<Triple> {
        let mut out = Vec::with_capacity(self.nodes.len() + self.edges.len() + 1);
        for n in self.variables() {
            out.push(Triple {
                kind: TripleKind::Instance,
                src: n.id.clone(),
                label: "instance".to_string(),
                tgt: n.concept.clone(),
            });
        }
        for e in &self.edges {
            let target = &self.nodes[self.index[&e.tgt]];
            let kind = match target.kind {
                NodeKind::Constant => TripleKind::Attribute,
                NodeKind::Variable => TripleKind::Relation,
            };
            let tgt = match kind {
                TripleKind::Attribute => target.concept.clone(),
                _ => target.id.clone(),
            };
            out.push(Triple { kind, src: e.src.clone(), label: e.label[1..].to_string(), tgt });
        }
        out.push(Triple {
            kind: TripleKind::Attribute,
            src: self.root.clone(),
            label: "TOP".to_string(),
            tgt: self.root_node().concept.clone(),
        });
        out
    }
}

impl fmt::Display for AmrGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::penman::serialize_penman(self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TripleKind {
    Instance,
    Attribute,
    Relation,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub kind: TripleKind,
    pub src: String,
    pub label: String,
    /// Variable name for relations, concept for instances, literal for attributes.
    pub tgt: String,
}

/// Incremental construction of an [`AmrGraph`].
///
/// Constants get fresh ids (`#0`, `#1`, ...) that cannot clash with
/// variable names.
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    next_constant: usize,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn variable(&mut self, id: impl Into<String>, concept: impl Into<String>) -> String {
        let id = id.into();
        self.nodes.push(Node { id: id.clone(), concept: concept.into(), kind: NodeKind::Variable });
        id
    }

    pub fn constant(&mut self, literal: impl Into<String>) -> String {
        let id = format!("#{}", self.next_constant);
        self.next_constant += 1;
        self.nodes.push(Node { id: id.clone(), concept: literal.into(), kind: NodeKind::Constant });
        id
    }

    pub fn edge(&mut self, src: impl Into<String>, label: impl Into<String>, tgt: impl Into<String>) -> &mut Self {
        self.edges.push(Edge { src: src.into(), label: label.into(), tgt: tgt.into() });
        self
    }

    pub fn build(self, root: impl Into<String>) -> Result<AmrGraph, GraphError> {
        AmrGraph::new(self.nodes, self.edges, root)
    }
}

/// A bare PENMAN symbol usable as variable, concept or constant.
pub(crate) fn is_symbol(s: &str) -> bool {
    !s.is_empty()
        && !s.starts_with(':')
        && !s.starts_with('"')
        && s != "/"
        && !crate::linearize::is_var_token_like(s)
        && !s.chars().any(|c| c.is_whitespace() || c == '(' || c == ')')
}

pub(crate) fn is_quoted(s: &str) -> bool {
    s.len() >= 2 && s.starts_with('"') && s.ends_with('"') && !s.contains(['\n', '\r'])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn want_boy() -> AmrGraph {
        let mut b = GraphBuilder::new();
        b.variable("w", "want-01");
        b.variable("b", "boy");
        b.edge("w", ":ARG0", "b");
        b.build("w").unwrap()
    }

    #[test]
    fn triples_of_two_node_graph() {
        let g = want_boy();
        let t = g.to_triples();
        assert_eq!(t.len(), 4);
        let has = |kind, src: &str, label: &str, tgt: &str| {
            t.contains(&Triple { kind, src: src.into(), label: label.into(), tgt: tgt.into() })
        };
        assert!(has(TripleKind::Instance, "w", "instance", "want-01"));
        assert!(has(TripleKind::Instance, "b", "instance", "boy"));
        assert!(has(TripleKind::Relation, "w", "ARG0", "b"));
        assert!(has(TripleKind::Attribute, "w", "TOP", "want-01"));
    }

    #[test]
    fn polarity_is_an_attribute() {
        let mut b = GraphBuilder::new();
        b.variable("p", "possible-01");
        let c = b.constant("-");
        b.edge("p", ":polarity", c);
        let g = b.build("p").unwrap();
        let t = g.to_triples();
        assert_eq!(t.len(), 3);
        assert!(t.contains(&Triple {
            kind: TripleKind::Attribute,
            src: "p".into(),
            label: "polarity".into(),
            tgt: "-".into()
        }));
    }

    #[test]
    fn rejects_unreachable_and_bad_edges() {
        let mut b = GraphBuilder::new();
        b.variable("a", "x");
        b.variable("b", "y");
        assert_eq!(b.clone().build("a").unwrap_err(), GraphError::Unreachable("b".into()));
        b.edge("a", "ARG0", "b");
        assert!(matches!(b.build("a"), Err(GraphError::BadLabel(_))));

        let mut b = GraphBuilder::new();
        b.variable("a", "x");
        let c = b.constant("5");
        b.edge("a", ":quant", c.clone()).edge(c, ":mod", "a");
        assert!(matches!(b.build("a"), Err(GraphError::ConstantSource(_))));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut b = GraphBuilder::new();
        b.variable("a", "x");
        b.variable("a", "y");
        assert_eq!(b.build("a").unwrap_err(), GraphError::DuplicateNode("a".into()));
    }

    #[test]
    fn metadata_fields() {
        let m = Metadata::from_lines(["# ::id abc.1 ::date 2012-04-25", "# ::snt The boy wants it ."]);
        assert_eq!(m.get("id"), Some("abc.1"));
        assert_eq!(m.get("date"), Some("2012-04-25"));
        assert_eq!(m.get("snt"), Some("The boy wants it ."));
        assert_eq!(m.get("tok"), None);
    }

    #[test]
    fn json_round_trip_validates() {
        let g = want_boy();
        let json = serde_json::to_string(&g).unwrap();
        let back: AmrGraph = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
        let broken = json.replace("\"root\":\"w\"", "\"root\":\"zz\"");
        assert!(serde_json::from_str::<AmrGraph>(&broken).is_err());
    }
}
