//! Graph-isomorphic linearization.
//!
//! A graph becomes the token sequence of a depth-first walk from the root:
//! `( <V0> want-01 :ARG0 ( <V1> boy ) :ARG1 ( <V2> go-02 :ARG0 <V1> ) )`.
//! Variables are replaced by `<Vn>` tokens numbered in first-visit order; the
//! first visit of a node expands it, later visits emit the bare variable
//! token. Constants appear inline. Children are visited in edge-list order.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{is_quoted, is_symbol, AmrGraph, GraphBuilder, NodeKind};

pub const OPEN: &str = "(";
pub const CLOSE: &str = ")";

/// A whitespace-separated token sequence. Not necessarily valid; see
/// [`LinearSeq::validate`] and [`crate::repair`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearSeq {
    tokens: Vec<String>,
}

impl LinearSeq {
    pub fn new(tokens: Vec<String>) -> Self {
        LinearSeq { tokens }
    }

    /// Splits a line on whitespace, keeping double-quoted literals (which
    /// may contain spaces) as single tokens.
    pub fn from_line(line: &str) -> Self {
        let mut tokens = Vec::new();
        let mut cur = String::new();
        let mut in_quote = false;
        let mut escaped = false;
        for c in line.chars() {
            if in_quote {
                cur.push(c);
                if escaped {
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == '"' {
                    in_quote = false;
                }
            } else if c.is_whitespace() {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            } else {
                if c == '"' && cur.is_empty() {
                    in_quote = true;
                }
                cur.push(c);
            }
        }
        if !cur.is_empty() {
            tokens.push(cur);
        }
        LinearSeq { tokens }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<String> {
        self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Checks every structural invariant by running the inverse.
    pub fn validate(&self) -> Result<(), LinearizeError> {
        delinearize(self).map(|_| ())
    }
}

impl fmt::Display for LinearSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tokens.join(" "))
    }
}

impl From<Vec<String>> for LinearSeq {
    fn from(tokens: Vec<String>) -> Self {
        LinearSeq { tokens }
    }
}

/// Lexical class of a sequence token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenClass {
    Open,
    Close,
    Var(usize),
    Relation,
    /// Concept label or constant literal.
    Literal,
    /// Cannot appear in a valid sequence (`:`, `<V01>`, `<Vx>`, empty, ...).
    Junk,
}

pub fn classify(tok: &str) -> TokenClass {
    if tok == OPEN {
        TokenClass::Open
    } else if tok == CLOSE {
        TokenClass::Close
    } else if let Some(n) = parse_var_token(tok) {
        TokenClass::Var(n)
    } else if is_var_token_like(tok) {
        TokenClass::Junk
    } else if tok.starts_with(':') {
        if tok.len() >= 2 && !tok.chars().any(|c| c.is_whitespace() || c == '(' || c == ')') {
            TokenClass::Relation
        } else {
            TokenClass::Junk
        }
    } else if is_symbol(tok) || is_quoted(tok) {
        TokenClass::Literal
    } else {
        TokenClass::Junk
    }
}

pub fn var_token(n: usize) -> String {
    format!("<V{n}>")
}

/// `<V0>`, `<V17>`; leading zeros are not canonical and rejected.
fn parse_var_token(tok: &str) -> Option<usize> {
    let digits = tok.strip_prefix("<V")?.strip_suffix('>')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || (digits.len() > 1 && digits.starts_with('0')) {
        return None;
    }
    digits.parse().ok()
}

pub(crate) fn is_var_token_like(tok: &str) -> bool {
    tok.starts_with("<V")
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinearizeError {
    #[error("invalid linearization at token {pos}: {msg}")]
    Invalid { pos: usize, msg: String },
}

fn invalid(pos: usize, msg: impl Into<String>) -> LinearizeError {
    LinearizeError::Invalid { pos, msg: msg.into() }
}

pub fn linearize(g: &AmrGraph) -> LinearSeq {
    let mut numbering = HashMap::new();
    let mut tokens = Vec::with_capacity(4 * g.nodes().len() + 2 * g.edges().len());
    walk(g, g.root(), &mut numbering, &mut tokens);
    LinearSeq { tokens }
}

fn walk<'g>(g: &'g AmrGraph, id: &'g str, numbering: &mut HashMap<&'g str, usize>, out: &mut Vec<String>) {
    let n = numbering.len();
    numbering.insert(id, n);
    out.push(OPEN.to_string());
    out.push(var_token(n));
    out.push(g.node(id).expect("validated graph").concept.clone());
    for e in g.edges_from(id) {
        out.push(e.label.clone());
        let tgt = g.node(&e.tgt).expect("validated graph");
        match (tgt.kind, numbering.get(e.tgt.as_str())) {
            (NodeKind::Constant, _) => out.push(tgt.concept.clone()),
            (NodeKind::Variable, Some(&k)) => out.push(var_token(k)),
            (NodeKind::Variable, None) => walk(g, &e.tgt, numbering, out),
        }
    }
    out.push(CLOSE.to_string());
}

/// Inverse of [`linearize`]. Variables are named `v0`, `v1`, ... after
/// their token index (`vv0`, ... if a constant literal would clash).
pub fn delinearize(seq: &LinearSeq) -> Result<AmrGraph, LinearizeError> {
    let toks = &seq.tokens;
    let classes: Vec<TokenClass> = toks.iter().map(|t| classify(t)).collect();
    let prefix = variable_prefix(toks, &classes);
    let mut b = GraphBuilder::new();
    let mut defined = 0usize;
    let mut pos = 0usize;
    let root = read_node(toks, &classes, &prefix, &mut pos, &mut defined, &mut b)?;
    if pos != toks.len() {
        return Err(invalid(pos, "trailing tokens after the root node"));
    }
    b.build(root).map_err(|e| invalid(0, e.to_string()))
}

/// `v`, unless some literal already looks like `v<digits>`; then `vv`, ...
fn variable_prefix(toks: &[String], classes: &[TokenClass]) -> String {
    let mut prefix = String::from("v");
    let clashes = |p: &str| {
        toks.iter().zip(classes).any(|(t, c)| {
            *c == TokenClass::Literal
                && t.strip_prefix(p).is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
        })
    };
    while clashes(&prefix) {
        prefix.push('v');
    }
    prefix
}

fn read_node(
    toks: &[String],
    classes: &[TokenClass],
    prefix: &str,
    pos: &mut usize,
    defined: &mut usize,
    b: &mut GraphBuilder,
) -> Result<String, LinearizeError> {
    if classes.get(*pos) != Some(&TokenClass::Open) {
        return Err(invalid(*pos, "expected `(`"));
    }
    *pos += 1;
    let var = match classes.get(*pos) {
        Some(&TokenClass::Var(n)) if n == *defined => n,
        Some(&TokenClass::Var(n)) if n < *defined => return Err(invalid(*pos, format!("<V{n}> defined twice"))),
        Some(&TokenClass::Var(n)) => return Err(invalid(*pos, format!("<V{n}> out of first-visit order"))),
        _ => return Err(invalid(*pos, "`(` must be followed by a variable token")),
    };
    *pos += 1;
    if classes.get(*pos) != Some(&TokenClass::Literal) {
        return Err(invalid(*pos, "variable definition without a concept"));
    }
    let id = format!("{prefix}{var}");
    b.variable(id.clone(), toks[*pos].clone());
    *defined += 1;
    *pos += 1;
    loop {
        match classes.get(*pos) {
            Some(TokenClass::Close) => {
                *pos += 1;
                return Ok(id);
            }
            Some(TokenClass::Relation) => {
                let label = toks[*pos].clone();
                *pos += 1;
                let tgt = match classes.get(*pos) {
                    Some(TokenClass::Open) => read_node(toks, classes, prefix, pos, defined, b)?,
                    Some(&TokenClass::Var(n)) if n < *defined => {
                        *pos += 1;
                        format!("{prefix}{n}")
                    }
                    Some(&TokenClass::Var(n)) => return Err(invalid(*pos, format!("reference to undefined <V{n}>"))),
                    Some(TokenClass::Literal) => {
                        *pos += 1;
                        b.constant(toks[*pos - 1].clone())
                    }
                    _ => return Err(invalid(*pos, format!("relation {label} has no value"))),
                };
                b.edge(id.clone(), label, tgt);
            }
            None => return Err(invalid(*pos, "unbalanced parentheses")),
            _ => return Err(invalid(*pos, "expected a relation or `)`")),
        }
    }
}
