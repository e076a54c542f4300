//! Random and template-generated data for tests, demos and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{AmrGraph, GraphBuilder, Metadata};
use crate::kd::{ToyCondModel, ToyConfig, Vocab};
use crate::linearize::linearize;

const CONCEPTS: &[&str] = &[
    "want-01", "believe-01", "go-02", "say-01", "see-01", "boy", "girl", "person", "city", "name", "and", "cat",
    "dog", "big", "\"odd concept\"",
];
const RELATIONS: &[&str] = &[":ARG0", ":ARG1", ":ARG2", ":mod", ":location", ":op1", ":op2", ":time", ":ARG0-of", ":domain"];
const ATTRIBUTES: &[&str] = &[":polarity", ":quant", ":op1", ":name", ":value", ":mode"];
const LITERALS: &[&str] = &["-", "5", "2024", "imperative", "\"New York\"", "\"a b\"", "\"(paren)\"", "\"\""];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphGenConfig {
    pub max_nodes: usize,
    pub max_variables: usize,
    pub max_reentrancies: usize,
}

impl Default for GraphGenConfig {
    fn default() -> Self {
        GraphGenConfig { max_nodes: 12, max_variables: 8, max_reentrancies: 2 }
    }
}

/// A random connected graph: a spanning tree over the variables, constants
/// hung off random variables, up to `max_reentrancies` extra edges between
/// variables (self-loops included), and the edge list shuffled.
pub fn random_graph<R: Rng>(rng: &mut R, cfg: &GraphGenConfig) -> AmrGraph {
    let nv = rng.gen_range(1..=cfg.max_variables.min(cfg.max_nodes).max(1));
    let nc = rng.gen_range(0..=cfg.max_nodes - nv);
    let mut b = GraphBuilder::new();
    let vars: Vec<String> = (0..nv).map(|i| b.variable(format!("n{i}"), *CONCEPTS.choose(rng).unwrap())).collect();
    let mut edges: Vec<(String, &str, String)> = Vec::new();
    for i in 1..nv {
        let parent = &vars[rng.gen_range(0..i)];
        edges.push((parent.clone(), *RELATIONS.choose(rng).unwrap(), vars[i].clone()));
    }
    for _ in 0..nc {
        let c = b.constant(*LITERALS.choose(rng).unwrap());
        edges.push((vars.choose(rng).unwrap().clone(), *ATTRIBUTES.choose(rng).unwrap(), c));
    }
    for _ in 0..rng.gen_range(0..=cfg.max_reentrancies) {
        let e = (vars.choose(rng).unwrap().clone(), *RELATIONS.choose(rng).unwrap(), vars.choose(rng).unwrap().clone());
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    edges.shuffle(rng);
    for (s, l, t) in edges {
        b.edge(s, l, t);
    }
    b.build(vars[0].clone()).expect("generated graph is valid")
}

/// Token sequences drawn from the linearization alphabet: half are
/// corrupted linearizations of random graphs, half are uniform noise.
pub fn random_tokens<R: Rng>(rng: &mut R, max_len: usize) -> Vec<String> {
    let mut toks: Vec<String> = if rng.gen_bool(0.5) {
        linearize(&random_graph(rng, &GraphGenConfig::default())).into_tokens()
    } else {
        Vec::new()
    };
    let edits = rng.gen_range(0..6);
    for _ in 0..edits {
        let pos = rng.gen_range(0..=toks.len());
        match rng.gen_range(0..4) {
            0 if pos < toks.len() => {
                toks.remove(pos);
            }
            1 => toks.truncate(pos),
            _ => {
                let t = random_token(rng);
                toks.insert(pos, t);
            }
        }
    }
    if toks.is_empty() || rng.gen_bool(0.3) {
        let n = rng.gen_range(0..=max_len);
        toks = (0..n).map(|_| random_token(rng)).collect();
    }
    toks.truncate(max_len);
    toks
}

fn random_token<R: Rng>(rng: &mut R) -> String {
    match rng.gen_range(0..10) {
        0 | 1 => "(".into(),
        2 | 3 => ")".into(),
        4 | 5 => format!("<V{}>", rng.gen_range(0..6)),
        6 => CONCEPTS.choose(rng).unwrap().to_string(),
        7 => RELATIONS.choose(rng).unwrap().to_string(),
        8 => LITERALS.choose(rng).unwrap().to_string(),
        _ => ["<V01>", "<Vx>", ":", "<mask>", "amr-unknown"].choose(rng).unwrap().to_string(),
    }
}

/// A toy model over output tokens `a`, `b` (plus EOS) trained on a few
/// random weighted sequences for the input `x`.
pub fn random_toy_model<R: Rng>(rng: &mut R) -> ToyCondModel {
    let config = ToyConfig { order: rng.gen_range(1..=3), alpha: rng.gen_range(0.05..1.0), ..Default::default() };
    let mut m = ToyCondModel::new(Vocab::new(["a", "b"]), config).unwrap();
    let x = ["x".to_string()];
    for _ in 0..rng.gen_range(1..8) {
        let len = rng.gen_range(0..5);
        let mut y: Vec<usize> = (0..len).map(|_| rng.gen_range(2..4)).collect();
        y.push(1);
        m.observe_sequence(&x, &y, rng.gen_range(0.1..3.0));
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthExample {
    pub id: String,
    pub sentence: String,
    pub graph: AmrGraph,
}

const NOUNS: &[&str] = &["boy", "girl", "cat", "dog", "teacher", "doctor", "student", "farmer"];
const VERBS: &[(&str, &str)] = &[("sleep", "sleep-01"), ("run", "run-02"), ("sing", "sing-01"), ("leave", "leave-11"), ("eat", "eat-01"), ("read", "read-01")];
const ADJS: &[&str] = &["tall", "small", "happy", "old"];
const NAMES: &[&str] = &["Anna", "Marco", "Li", "Hans", "Lucia"];
const CITIES: &[&str] = &["Berlin", "Rome", "Madrid", "Beijing"];

/// English sentences with gold graphs from a handful of templates (with
/// re-entrancies, negation, modifiers and names). Ids are `syn-NNNN`.
pub fn synthetic_corpus<R: Rng>(rng: &mut R, n: usize) -> Vec<SynthExample> {
    (0..n)
        .map(|i| {
            let (sentence, graph) = template(rng);
            let id = format!("syn-{i:04}");
            let meta = Metadata::from_lines([format!("# ::id {id}"), format!("# ::snt {sentence}")]);
            SynthExample { id, sentence, graph: graph.with_metadata(meta) }
        })
        .collect()
}

fn template<R: Rng>(rng: &mut R) -> (String, AmrGraph) {
    let n1 = *NOUNS.choose(rng).unwrap();
    let n2 = *NOUNS.choose(rng).unwrap();
    let (verb, frame) = *VERBS.choose(rng).unwrap();
    let mut b = GraphBuilder::new();
    match rng.gen_range(0..5) {
        0 => {
            let v = b.variable("v", frame);
            let a = b.variable("a", n1);
            b.edge(&v, ":ARG0", &a);
            (format!("the {n1} {verb}s"), b.build(v).unwrap())
        }
        1 => {
            let w = b.variable("w", "want-01");
            let a = b.variable("a", n1);
            let v = b.variable("v", frame);
            b.edge(&w, ":ARG0", &a).edge(&w, ":ARG1", &v).edge(&v, ":ARG0", &a);
            (format!("the {n1} wants to {verb}"), b.build(w).unwrap())
        }
        2 => {
            let adj = *ADJS.choose(rng).unwrap();
            let s = b.variable("s", "see-01");
            let a = b.variable("a", n1);
            let m = b.variable("m", adj);
            let o = b.variable("o", n2);
            b.edge(&s, ":ARG0", &a).edge(&a, ":mod", &m).edge(&s, ":ARG1", &o);
            (format!("the {adj} {n1} sees the {n2}"), b.build(s).unwrap())
        }
        3 => {
            let v = b.variable("v", frame);
            let a = b.variable("a", n1);
            let neg = b.constant("-");
            b.edge(&v, ":polarity", &neg).edge(&v, ":ARG0", &a);
            (format!("the {n1} does not {verb}"), b.build(v).unwrap())
        }
        _ => {
            let name = *NAMES.choose(rng).unwrap();
            let city = *CITIES.choose(rng).unwrap();
            let l = b.variable("l", "live-01");
            let p = b.variable("p", "person");
            let pn = b.variable("n", "name");
            let c = b.variable("c", "city");
            let cn = b.variable("n2", "name");
            let op_p = b.constant(format!("\"{name}\""));
            let op_c = b.constant(format!("\"{city}\""));
            b.edge(&l, ":ARG0", &p)
                .edge(&p, ":name", &pn)
                .edge(&pn, ":op1", &op_p)
                .edge(&l, ":location", &c)
                .edge(&c, ":name", &cn)
                .edge(&cn, ":op1", &op_c);
            (format!("{name} lives in {city}"), b.build(l).unwrap())
        }
    }
}
