//! PENMAN notation reader and writer.
//!
//! Reads the AMR release format: optional `#` comment lines followed by one
//! parenthesized expression. Indentation and line breaks inside the
//! expression are insignificant. Bare symbols that name a variable defined
//! anywhere in the expression are re-entrancies; all other bare symbols and
//! every quoted string are constants.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{AmrGraph, GraphBuilder, GraphError, Metadata, NodeKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PenmanError {
    #[error("malformed PENMAN at byte {pos}: {msg}")]
    Malformed { pos: usize, msg: String },
    #[error("invalid graph: {0}")]
    Graph(#[from] GraphError),
}

impl PenmanError {
    fn at(pos: usize, msg: impl Into<String>) -> Self {
        PenmanError::Malformed { pos, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Slash,
    Role(String),
    Symbol(String),
    Str(String),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, PenmanError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        match c {
            b'(' => {
                out.push((start, Tok::Open));
                i += 1;
            }
            b')' => {
                out.push((start, Tok::Close));
                i += 1;
            }
            b'"' => {
                i += 1;
                let mut closed = false;
                while i < bytes.len() {
                    match bytes[i] {
                        b'\\' => i += 2,
                        b'"' => {
                            i += 1;
                            closed = true;
                            break;
                        }
                        b'\n' | b'\r' => break,
                        _ => i += 1,
                    }
                }
                if !closed {
                    return Err(PenmanError::at(start, "unterminated string"));
                }
                out.push((start, Tok::Str(text[start..i].to_string())));
            }
            _ => {
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && !matches!(bytes[i], b'(' | b')' | b'"') {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = if word == "/" {
                    Tok::Slash
                } else if word.starts_with(':') {
                    Tok::Role(word.to_string())
                } else {
                    Tok::Symbol(word.to_string())
                };
                out.push((start, tok));
            }
        }
    }
    Ok(out)
}

enum Target {
    Node(String),
    Symbol(String),
    Str(String),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    concepts: Vec<(String, String)>,
    defined: HashMap<String, usize>,
    edges: Vec<(String, String, Option<Target>)>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn node(&mut self) -> Result<String, PenmanError> {
        let at = self.offset();
        if self.next() != Some(Tok::Open) {
            return Err(PenmanError::at(at, "expected `(`"));
        }
        let at = self.offset();
        let var = match self.next() {
            Some(Tok::Symbol(v)) => v,
            None => return Err(PenmanError::at(at, "unbalanced parentheses")),
            _ => return Err(PenmanError::at(at, "expected a variable after `(`")),
        };
        let at = self.offset();
        match self.next() {
            Some(Tok::Slash) => {}
            None => return Err(PenmanError::at(at, "unbalanced parentheses")),
            _ => return Err(PenmanError::at(at, format!("missing concept for `{var}`"))),
        }
        let at = self.offset();
        let concept = match self.next() {
            Some(Tok::Symbol(c)) | Some(Tok::Str(c)) => c,
            None => return Err(PenmanError::at(at, "unbalanced parentheses")),
            _ => return Err(PenmanError::at(at, format!("missing concept after `/` for `{var}`"))),
        };
        if self.defined.insert(var.clone(), at).is_some() {
            return Err(PenmanError::at(at, format!("duplicate variable definition `{var}`")));
        }
        self.concepts.push((var.clone(), concept));

        loop {
            let at = self.offset();
            match self.next() {
                Some(Tok::Close) => return Ok(var),
                Some(Tok::Role(label)) => {
                    let slot = self.edges.len();
                    self.edges.push((var.clone(), label, None));
                    let target = match self.peek() {
                        Some(Tok::Open) => Target::Node(self.node()?),
                        Some(Tok::Symbol(_)) | Some(Tok::Str(_)) => match self.next() {
                            Some(Tok::Symbol(s)) => Target::Symbol(s),
                            Some(Tok::Str(s)) => Target::Str(s),
                            _ => unreachable!(),
                        },
                        None => return Err(PenmanError::at(self.end, "unbalanced parentheses")),
                        _ => return Err(PenmanError::at(self.offset(), "relation without a target")),
                    };
                    self.edges[slot].2 = Some(target);
                }
                None => return Err(PenmanError::at(at, "unbalanced parentheses")),
                Some(_) => return Err(PenmanError::at(at, "expected a relation or `)`")),
            }
        }
    }
}

/// Parses one AMR block: optional `#` comment lines, then a single PENMAN
/// expression.
pub fn parse_penman(text: &str) -> Result<AmrGraph, PenmanError> {
    let mut meta = Vec::new();
    let mut body = String::new();
    let mut offset_base = 0;
    let mut in_body = false;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim_start();
        if !in_body && trimmed.starts_with('#') {
            meta.push(line.trim_end_matches(['\n', '\r']).to_string());
            offset_base += line.len();
        } else if !in_body && trimmed.is_empty() {
            offset_base += line.len();
        } else {
            in_body = true;
            body.push_str(line);
        }
    }
    let toks = tokenize(&body).map_err(|e| shift(e, offset_base))?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: body.len(),
        concepts: Vec::new(),
        defined: HashMap::new(),
        edges: Vec::new(),
    };
    if p.toks.is_empty() {
        return Err(PenmanError::at(offset_base, "empty input"));
    }
    let root = p.node().map_err(|e| shift(e, offset_base))?;
    if p.pos < p.toks.len() {
        return Err(PenmanError::at(offset_base + p.offset(), "trailing content after the root expression"));
    }

    let mut b = GraphBuilder::new();
    for (var, concept) in &p.concepts {
        b.variable(var.clone(), concept.clone());
    }
    for (src, label, target) in p.edges {
        let tgt = match target.expect("every relation slot is filled") {
            Target::Node(v) => v,
            Target::Symbol(s) if p.defined.contains_key(&s) => s,
            Target::Symbol(s) | Target::Str(s) => b.constant(s),
        };
        b.edge(src, label, tgt);
    }
    Ok(b.build(root)?.with_metadata(Metadata::from_lines(meta)))
}

fn shift(e: PenmanError, by: usize) -> PenmanError {
    match e {
        PenmanError::Malformed { pos, msg } => PenmanError::Malformed { pos: pos + by, msg },
        other => other,
    }
}

/// Parses a release-style file: blocks separated by blank lines. Blocks
/// holding only comments (file headers) are skipped.
pub fn parse_amr_file(text: &str) -> Result<Vec<AmrGraph>, (usize, PenmanError)> {
    split_blocks(text)
        .into_iter()
        .enumerate()
        .map(|(i, block)| parse_penman(&block).map_err(|e| (i, e)))
        .collect()
}

/// Blank-line separated blocks that contain a PENMAN expression.
pub fn split_blocks(text: &str) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut cur = String::new();
    let mut has_body = false;
    for line in text.lines() {
        if line.trim().is_empty() {
            if has_body {
                blocks.push(std::mem::take(&mut cur));
            }
            cur.clear();
            has_body = false;
            continue;
        }
        if !line.trim_start().starts_with('#') {
            has_body = true;
        }
        cur.push_str(line);
        cur.push('\n');
    }
    if has_body {
        blocks.push(cur);
    }
    blocks
}

/// Writes `g` as single-line PENMAN, preceded by its metadata lines.
pub fn serialize_penman(g: &AmrGraph) -> String {
    let mut out = String::new();
    for line in g.metadata().lines() {
        out.push_str(line);
        out.push('\n');
    }
    let mut expanded = std::collections::HashSet::new();
    write_node(g, g.root(), &mut expanded, &mut out);
    out
}

fn write_node<'g>(g: &'g AmrGraph, id: &'g str, expanded: &mut std::collections::HashSet<&'g str>, out: &mut String) {
    let node = g.node(id).expect("validated graph");
    expanded.insert(id);
    out.push('(');
    out.push_str(id);
    out.push_str(" / ");
    out.push_str(&node.concept);
    for e in g.edges_from(id) {
        out.push(' ');
        out.push_str(&e.label);
        out.push(' ');
        let tgt = g.node(&e.tgt).expect("validated graph");
        match tgt.kind {
            NodeKind::Constant => out.push_str(&tgt.concept),
            NodeKind::Variable if expanded.contains(e.tgt.as_str()) => out.push_str(&e.tgt),
            NodeKind::Variable => write_node(g, &e.tgt, expanded, out),
        }
    }
    out.push(')');
}

/// Serializes many graphs as a release-style file.
pub fn write_amr_file(graphs: &[AmrGraph]) -> String {
    let mut out = String::new();
    for g in graphs {
        out.push_str(&serialize_penman(g));
        out.push_str("\n\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, TripleKind};

    #[test]
    fn parses_two_node_graph() {
        let g = parse_penman("(w / want-01 :ARG0 (b / boy))").unwrap();
        assert_eq!(g.root(), "w");
        assert_eq!(g.nodes().len(), 2);
        assert_eq!(g.node("w").unwrap().concept, "want-01");
        assert_eq!(g.node("b").unwrap().concept, "boy");
        assert_eq!(g.edges(), &[Edge { src: "w".into(), label: ":ARG0".into(), tgt: "b".into() }]);
    }

    #[test]
    fn single_node() {
        let g = parse_penman("(c / cat)").unwrap();
        assert_eq!(g.nodes().len(), 1);
        assert!(g.edges().is_empty());
        assert_eq!(serialize_penman(&g), "(c / cat)");
    }

    #[test]
    fn unbalanced_is_malformed() {
        let e = parse_penman("(w / want-01 :ARG0 (b / boy").unwrap_err();
        assert!(matches!(e, PenmanError::Malformed { .. }), "{e}");
        assert!(e.to_string().contains("unbalanced"));
        assert!(parse_penman("(c / cat))").is_err());
    }

    #[test]
    fn missing_concept_and_duplicates() {
        assert!(parse_penman("(c /)").is_err());
        assert!(parse_penman("(c)").is_err());
        assert!(parse_penman("(c / )").is_err());
        let e = parse_penman("(a / and :op1 (a / cat))").unwrap_err();
        assert!(e.to_string().contains("duplicate variable"));
        assert!(parse_penman("(a / and :op1)").is_err());
        assert!(parse_penman("(a / and cat)").is_err());
        assert!(parse_penman("").is_err());
        assert!(parse_penman("# ::snt only metadata").is_err());
    }

    #[test]
    fn reentrancy_and_serialization() {
        let text = "(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))";
        let g = parse_penman(text).unwrap();
        assert_eq!(g.nodes().len(), 3);
        assert_eq!(g.edges().len(), 3);
        assert_eq!(g.edges()[2], Edge { src: "g".into(), label: ":ARG0".into(), tgt: "b".into() });
        assert_eq!(serialize_penman(&g), text);
    }

    #[test]
    fn forward_reference_is_reentrancy() {
        let g = parse_penman("(w / want-01 :ARG0 b :ARG1 (b / boy))").unwrap();
        assert_eq!(g.nodes().len(), 2);
        assert_eq!(serialize_penman(&g), "(w / want-01 :ARG0 (b / boy) :ARG1 b)");
    }

    #[test]
    fn constants_and_strings() {
        let g = parse_penman(r#"(p / possible-01 :polarity - :name (n / name :op1 "New (York)" :op2 "a \"q\""))"#)
            .unwrap();
        let t = g.to_triples();
        assert!(t.iter().any(|t| t.kind == TripleKind::Attribute && t.label == "polarity" && t.tgt == "-"));
        assert!(t.iter().any(|t| t.tgt == "\"New (York)\""));
        let again = parse_penman(&serialize_penman(&g)).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn indentation_is_discarded_and_metadata_kept() {
        let text = "# ::id x.1\n# ::snt The boy wants .\n(w / want-01\n      :ARG0 (b / boy))\n";
        let g = parse_penman(text).unwrap();
        assert_eq!(g.metadata().get("snt"), Some("The boy wants ."));
        assert_eq!(serialize_penman(&g), "# ::id x.1\n# ::snt The boy wants .\n(w / want-01 :ARG0 (b / boy))");
    }

    #[test]
    fn file_blocks() {
        let text = "# AMR release header\n\n# ::id 1\n(a / cat)\n\n\n(b / dog\n  :mod (c / big))\n";
        let gs = parse_amr_file(text).unwrap();
        assert_eq!(gs.len(), 2);
        assert_eq!(gs[0].metadata().get("id"), Some("1"));
        let rt = parse_amr_file(&write_amr_file(&gs)).unwrap();
        assert_eq!(rt, gs);
        let err = parse_amr_file("(a / cat)\n\n(b / dog").unwrap_err();
        assert_eq!(err.0, 1);
    }
}
