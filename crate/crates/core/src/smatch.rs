//! Smatch: triple overlap under the best variable mapping.
//!
//! Both graphs are decomposed into triples ([`AmrGraph::to_triples`]). A
//! mapping sends variables of the predicted graph injectively to variables of
//! the gold graph; a predicted triple matches when its image is a gold
//! triple. Triples are compared as multisets, so repeated edges count once
//! per occurrence on each side.
//!
//! [`smatch_hill_climb`] is the usual restart-and-climb search.
//! [`smatch_exact`] enumerates injections with branch and bound and serves
//! as its oracle.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{AmrGraph, TripleKind};
use crate::util::mix_seed;

pub const DEFAULT_RESTARTS: usize = 4;
/// Largest smaller-side variable count [`smatch_exact`] accepts.
pub const EXACT_MAX_VARIABLES: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmatchError {
    #[error("exact smatch needs min(|vars|) <= {EXACT_MAX_VARIABLES}, got {0}")]
    TooLarge(usize),
    #[error("predicted corpus has {pred} graphs but gold has {gold}")]
    CountMismatch { pred: usize, gold: usize },
    #[error("gold graph with ::id `{0}` has no prediction")]
    MissingId(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmatchResult {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub matched: usize,
    pub pred_total: usize,
    pub gold_total: usize,
    /// Predicted variable -> gold variable.
    pub mapping: BTreeMap<String, String>,
}

pub fn prf(matched: usize, pred_total: usize, gold_total: usize) -> (f64, f64, f64) {
    let p = if pred_total == 0 { 0.0 } else { matched as f64 / pred_total as f64 };
    let r = if gold_total == 0 { 0.0 } else { matched as f64 / gold_total as f64 };
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum UnaryKey {
    Instance(String),
    Attribute(String, String),
    SelfLoop(String),
}

/// One side of a comparison with variables replaced by dense indices.
struct Side {
    names: Vec<String>,
    unary: Vec<HashMap<UnaryKey, usize>>,
    /// Directed variable pairs (i != k) with their label multiset.
    pairs: HashMap<(usize, usize), HashMap<String, usize>>,
    total: usize,
}

fn norm_label(l: &str) -> String {
    l.to_lowercase()
}

fn norm_constant(c: &str) -> String {
    if c.len() >= 2 && c.starts_with('"') && c.ends_with('"') {
        c[1..c.len() - 1].to_string()
    } else {
        c.to_string()
    }
}

impl Side {
    fn new(g: &AmrGraph) -> Side {
        let names: Vec<String> = g.variables().map(|n| n.id.clone()).collect();
        let idx: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut unary = vec![HashMap::new(); names.len()];
        let mut pairs: HashMap<(usize, usize), HashMap<String, usize>> = HashMap::new();
        let triples = g.to_triples();
        for t in &triples {
            let s = idx[t.src.as_str()];
            let key = match t.kind {
                TripleKind::Instance => UnaryKey::Instance(t.tgt.clone()),
                TripleKind::Attribute => UnaryKey::Attribute(norm_label(&t.label), norm_constant(&t.tgt)),
                TripleKind::Relation => {
                    let k = idx[t.tgt.as_str()];
                    if k == s {
                        UnaryKey::SelfLoop(norm_label(&t.label))
                    } else {
                        *pairs.entry((s, k)).or_default().entry(norm_label(&t.label)).or_default() += 1;
                        continue;
                    }
                }
            };
            *unary[s].entry(key).or_default() += 1;
        }
        Side { names, unary, pairs, total: triples.len() }
    }
}

fn multiset_overlap<K: Eq + std::hash::Hash>(a: &HashMap<K, usize>, b: &HashMap<K, usize>) -> usize {
    a.iter().map(|(k, &n)| n.min(b.get(k).copied().unwrap_or(0))).sum()
}

/// Precomputed match weights between a "left" and a "right" side.
struct Problem<'a> {
    left: &'a Side,
    right: &'a Side,
    unary: Vec<Vec<usize>>,
    /// Left pairs as a list, plus per-variable incidence.
    pair_list: Vec<((usize, usize), &'a HashMap<String, usize>)>,
    incident: Vec<Vec<usize>>,
}

impl<'a> Problem<'a> {
    fn new(left: &'a Side, right: &'a Side) -> Self {
        let unary = left
            .unary
            .iter()
            .map(|u| right.unary.iter().map(|v| multiset_overlap(u, v)).collect())
            .collect();
        let mut pair_list: Vec<_> = left.pairs.iter().map(|(&k, v)| (k, v)).collect();
        pair_list.sort_by_key(|(k, _)| *k);
        let mut incident = vec![Vec::new(); left.names.len()];
        for (pi, ((a, b), _)) in pair_list.iter().enumerate() {
            incident[*a].push(pi);
            incident[*b].push(pi);
        }
        Problem { left, right, unary, pair_list, incident }
    }

    fn pair_score(&self, pi: usize, ja: usize, jb: usize) -> usize {
        let (_, labels) = &self.pair_list[pi];
        match self.right.pairs.get(&(ja, jb)) {
            Some(gold) => multiset_overlap(labels, gold),
            None => 0,
        }
    }

    fn pair_score_mapped(&self, pi: usize, mapping: &[Option<usize>]) -> usize {
        let ((a, b), _) = self.pair_list[pi];
        match (mapping[a], mapping[b]) {
            (Some(ja), Some(jb)) => self.pair_score(pi, ja, jb),
            _ => 0,
        }
    }

    fn score(&self, mapping: &[Option<usize>]) -> usize {
        let u: usize = mapping.iter().enumerate().filter_map(|(i, m)| m.map(|j| self.unary[i][j])).sum();
        let p: usize = (0..self.pair_list.len()).map(|pi| self.pair_score_mapped(pi, mapping)).sum();
        u + p
    }

    /// Score of everything touching any of `vars`, each pair once.
    fn local_score(&self, mapping: &[Option<usize>], vars: &[usize]) -> usize {
        let mut s = 0;
        let mut seen: Vec<usize> = Vec::new();
        for &i in vars {
            if let Some(j) = mapping[i] {
                s += self.unary[i][j];
            }
            for &pi in &self.incident[i] {
                if !seen.contains(&pi) {
                    seen.push(pi);
                    s += self.pair_score_mapped(pi, mapping);
                }
            }
        }
        s
    }

    fn result(&self, mapping: &[Option<usize>], matched: usize) -> SmatchResult {
        let (precision, recall, f1) = prf(matched, self.left.total, self.right.total);
        let mapping = mapping
            .iter()
            .enumerate()
            .filter_map(|(i, m)| m.map(|j| (self.left.names[i].clone(), self.right.names[j].clone())))
            .collect();
        SmatchResult { precision, recall, f1, matched, pred_total: self.left.total, gold_total: self.right.total, mapping }
    }
}

/// Hill climbing from `restarts` starting points: one concept-matching
/// greedy start and `restarts - 1` random injections. Moves are single
/// variable remaps (to an unused gold variable) and pairwise swaps; the best
/// strictly improving move is taken until none remains.
pub fn smatch_hill_climb(pred: &AmrGraph, gold: &AmrGraph, restarts: usize, seed: u64) -> SmatchResult {
    let left = Side::new(pred);
    let right = Side::new(gold);
    let prob = Problem::new(&left, &right);
    let n = left.names.len();
    let m = right.names.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut best: Option<(usize, Vec<Option<usize>>)> = None;
    for r in 0..restarts.max(1) {
        let init = if r == 0 { greedy_start(&prob) } else { random_start(n, m, &mut rng) };
        let (score, mapping) = climb(&prob, init);
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, mapping));
        }
    }
    let (score, mapping) = best.expect("at least one restart");
    prob.result(&mapping, score)
}

fn greedy_start(prob: &Problem) -> Vec<Option<usize>> {
    let mut used = vec![false; prob.right.names.len()];
    (0..prob.left.names.len())
        .map(|i| {
            let concept = prob.left.unary[i].keys().find_map(|k| match k {
                UnaryKey::Instance(c) => Some(c),
                _ => None,
            })?;
            let j = (0..used.len()).find(|&j| {
                !used[j] && prob.right.unary[j].contains_key(&UnaryKey::Instance(concept.clone()))
            })?;
            used[j] = true;
            Some(j)
        })
        .collect()
}

fn random_start(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<Option<usize>> {
    let mut targets: Vec<usize> = (0..m).collect();
    targets.shuffle(rng);
    (0..n).map(|i| targets.get(i).copied()).collect()
}

fn climb(prob: &Problem, mut mapping: Vec<Option<usize>>) -> (usize, Vec<Option<usize>>) {
    let n = mapping.len();
    let m = prob.right.names.len();
    let mut used = vec![false; m];
    for j in mapping.iter().flatten() {
        used[*j] = true;
    }
    let mut score = prob.score(&mapping);
    loop {
        let mut best_gain = 0usize;
        let mut best_move: Option<(usize, usize, bool)> = None;
        for i in 0..n {
            let before = prob.local_score(&mapping, &[i]);
            let old = mapping[i];
            for j in 0..m {
                if used[j] {
                    continue;
                }
                mapping[i] = Some(j);
                let after = prob.local_score(&mapping, &[i]);
                if after > before && after - before > best_gain {
                    best_gain = after - before;
                    best_move = Some((i, j, false));
                }
            }
            mapping[i] = old;
        }
        for i in 0..n {
            for k in i + 1..n {
                if mapping[i] == mapping[k] {
                    continue;
                }
                let before = prob.local_score(&mapping, &[i, k]);
                mapping.swap(i, k);
                let after = prob.local_score(&mapping, &[i, k]);
                mapping.swap(i, k);
                if after > before && after - before > best_gain {
                    best_gain = after - before;
                    best_move = Some((i, k, true));
                }
            }
        }
        match best_move {
            None => return (score, mapping),
            Some((i, k, true)) => mapping.swap(i, k),
            Some((i, j, false)) => {
                if let Some(old) = mapping[i] {
                    used[old] = false;
                }
                used[j] = true;
                mapping[i] = Some(j);
            }
        }
        score += best_gain;
    }
}

/// Globally optimal Smatch by exhaustive search over injections of the
/// smaller variable set into the larger one.
pub fn smatch_exact(pred: &AmrGraph, gold: &AmrGraph) -> Result<SmatchResult, SmatchError> {
    let p = Side::new(pred);
    let g = Side::new(gold);
    let small = p.names.len().min(g.names.len());
    if small > EXACT_MAX_VARIABLES {
        return Err(SmatchError::TooLarge(small));
    }
    if p.names.len() <= g.names.len() {
        let prob = Problem::new(&p, &g);
        let (score, mapping) = branch_and_bound(&prob);
        Ok(prob.result(&mapping, score))
    } else {
        let prob = Problem::new(&g, &p);
        let (score, inverse) = branch_and_bound(&prob);
        let mut mapping = vec![None; p.names.len()];
        for (gi, pi) in inverse.iter().enumerate() {
            if let Some(pi) = pi {
                mapping[*pi] = Some(gi);
            }
        }
        let forward = Problem::new(&p, &g);
        Ok(forward.result(&mapping, score))
    }
}

/// Requires `left` to have no more variables than `right`.
fn branch_and_bound(prob: &Problem) -> (usize, Vec<Option<usize>>) {
    let n = prob.left.names.len();
    let m = prob.right.names.len();
    debug_assert!(n <= m);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(prob.incident[i].len()));
    let mut position = vec![0; n];
    for (d, &i) in order.iter().enumerate() {
        position[i] = d;
    }
    let best_unary: Vec<usize> = (0..n).map(|i| prob.unary[i].iter().copied().max().unwrap_or(0)).collect();
    let pair_cap: Vec<usize> = prob.pair_list.iter().map(|(_, l)| l.values().sum()).collect();
    // Optimistic remaining score once depth d is reached.
    let mut bound_from = vec![0; n + 1];
    for d in (0..n).rev() {
        let i = order[d];
        let later_pairs: usize = prob.incident[i]
            .iter()
            .filter(|&&pi| {
                let ((a, b), _) = prob.pair_list[pi];
                let other = if a == i { b } else { a };
                position[other] <= d
            })
            .map(|&pi| pair_cap[pi])
            .sum();
        bound_from[d] = bound_from[d + 1] + best_unary[i] + later_pairs;
    }

    let mut state = Search {
        prob,
        order: &order,
        bound_from: &bound_from,
        mapping: vec![None; n],
        used: vec![false; m],
        best: 0,
        best_mapping: None,
    };
    state.descend(0, 0);
    let best = state.best;
    let mapping = state.best_mapping.unwrap_or_else(|| vec![None; n]);
    (best, mapping)
}

struct Search<'a> {
    prob: &'a Problem<'a>,
    order: &'a [usize],
    bound_from: &'a [usize],
    mapping: Vec<Option<usize>>,
    used: Vec<bool>,
    best: usize,
    best_mapping: Option<Vec<Option<usize>>>,
}

impl Search<'_> {
    fn descend(&mut self, depth: usize, score: usize) {
        if depth == self.order.len() {
            if self.best_mapping.is_none() || score > self.best {
                self.best = score;
                self.best_mapping = Some(self.mapping.clone());
            }
            return;
        }
        if self.best_mapping.is_some() && score + self.bound_from[depth] <= self.best {
            return;
        }
        let i = self.order[depth];
        let m = self.used.len();
        let mut candidates: Vec<(usize, usize)> = (0..m)
            .filter(|&j| !self.used[j])
            .map(|j| (j, self.gain(i, j)))
            .collect();
        candidates.sort_by_key(|&(j, g)| (std::cmp::Reverse(g), j));
        for (j, gain) in candidates {
            self.mapping[i] = Some(j);
            self.used[j] = true;
            self.descend(depth + 1, score + gain);
            self.used[j] = false;
            self.mapping[i] = None;
        }
    }

    /// Score added by mapping `i -> j` given the already assigned variables.
    fn gain(&self, i: usize, j: usize) -> usize {
        let mut s = self.prob.unary[i][j];
        for &pi in &self.prob.incident[i] {
            let ((a, b), _) = self.prob.pair_list[pi];
            let (ja, jb) = if a == i { (Some(j), self.mapping[b]) } else { (self.mapping[a], Some(j)) };
            if let (Some(ja), Some(jb)) = (ja, jb) {
                s += self.prob.pair_score(pi, ja, jb);
            }
        }
        s
    }
}

/// Graph isomorphism up to variable renaming, under Smatch's triple
/// comparison. Not bounded in size: candidate variables must agree on all
/// their unary triples, which prunes almost everything on real graphs.
pub fn isomorphic(a: &AmrGraph, b: &AmrGraph) -> bool {
    let left = Side::new(a);
    let right = Side::new(b);
    if left.total != right.total || left.names.len() != right.names.len() || left.pairs.len() != right.pairs.len() {
        return false;
    }
    let n = left.names.len();
    let mut mapping = vec![None; n];
    let mut used = vec![false; n];
    iso_descend(&left, &right, 0, &mut mapping, &mut used)
}

fn iso_descend(l: &Side, r: &Side, i: usize, mapping: &mut Vec<Option<usize>>, used: &mut Vec<bool>) -> bool {
    if i == mapping.len() {
        return true;
    }
    let empty = HashMap::new();
    for j in 0..used.len() {
        if used[j] || l.unary[i] != r.unary[j] {
            continue;
        }
        let consistent = (0..i).all(|k| {
            let mk = mapping[k].expect("assigned in order");
            l.pairs.get(&(i, k)).unwrap_or(&empty) == r.pairs.get(&(j, mk)).unwrap_or(&empty)
                && l.pairs.get(&(k, i)).unwrap_or(&empty) == r.pairs.get(&(mk, j)).unwrap_or(&empty)
        });
        if !consistent {
            continue;
        }
        mapping[i] = Some(j);
        used[j] = true;
        if iso_descend(l, r, i + 1, mapping, used) {
            return true;
        }
        used[j] = false;
        mapping[i] = None;
    }
    false
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub n_records: usize,
    pub matched: usize,
    pub pred_total: usize,
    pub gold_total: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub records: Vec<SmatchResult>,
}

impl CorpusReport {
    /// Micro average: sums of matched and totals, then one division.
    pub fn from_records(records: Vec<SmatchResult>) -> Self {
        let matched = records.iter().map(|r| r.matched).sum();
        let pred_total = records.iter().map(|r| r.pred_total).sum();
        let gold_total = records.iter().map(|r| r.gold_total).sum();
        let (precision, recall, f1) = prf(matched, pred_total, gold_total);
        CorpusReport { precision, recall, f1, n_records: records.len(), matched, pred_total, gold_total, records }
    }
}

/// Scores aligned predicted/gold corpora. Records are paired by `::id` when
/// every graph on both sides has one, by position otherwise. Record `i` is
/// climbed with a seed derived from `(seed, i)`, so the result does not
/// depend on evaluation order.
pub fn corpus_smatch(pred: &[AmrGraph], gold: &[AmrGraph], restarts: usize, seed: u64) -> Result<CorpusReport, SmatchError> {
    if pred.len() != gold.len() {
        return Err(SmatchError::CountMismatch { pred: pred.len(), gold: gold.len() });
    }
    let by_id = !pred.is_empty()
        && pred.iter().chain(gold).all(|g| g.metadata().get("id").is_some_and(|id| !id.is_empty()));
    let pairs: Vec<(&AmrGraph, &AmrGraph)> = if by_id {
        let index: HashMap<&str, &AmrGraph> = pred.iter().map(|g| (g.metadata().get("id").unwrap(), g)).collect();
        gold.iter()
            .map(|g| {
                let id = g.metadata().get("id").unwrap();
                index.get(id).map(|p| (*p, g)).ok_or_else(|| SmatchError::MissingId(id.to_string()))
            })
            .collect::<Result<_, _>>()?
    } else {
        pred.iter().zip(gold).collect()
    };
    let records: Vec<SmatchResult> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (p, g))| smatch_hill_climb(p, g, restarts, mix_seed(seed, i as u64)))
        .collect();
    Ok(CorpusReport::from_records(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penman::parse_penman;

    fn g(s: &str) -> AmrGraph {
        parse_penman(s).unwrap()
    }

    #[test]
    fn identical_graphs_score_one() {
        let a = g("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))");
        let r = smatch_hill_climb(&a, &a, 4, 0);
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));
        assert_eq!(smatch_exact(&a, &a).unwrap().f1, 1.0);
    }

    #[test]
    fn cat_vs_dog() {
        let r = smatch_hill_climb(&g("(c / cat)"), &g("(d / dog)"), 4, 0);
        assert_eq!(r.matched, 0);
        assert_eq!((r.pred_total, r.gold_total), (2, 2));
        assert_eq!(r.f1, 0.0);
        assert_eq!(smatch_exact(&g("(c / cat)"), &g("(d / dog)")).unwrap().f1, 0.0);
    }

    #[test]
    fn boy_vs_girl() {
        let p = g("(w / want-01 :ARG0 (b / boy))");
        let q = g("(w / want-01 :ARG0 (g / girl))");
        for r in [smatch_hill_climb(&p, &q, 4, 1), smatch_exact(&p, &q).unwrap()] {
            assert_eq!(r.matched, 3);
            assert_eq!((r.precision, r.recall, r.f1), (0.75, 0.75, 0.75));
            assert_eq!(r.mapping.get("w").map(String::as_str), Some("w"));
        }
    }

    #[test]
    fn fallback_graph_precision_over_two_triples() {
        let p = g("(v0 / amr-empty)");
        let q = g("(w / want-01 :ARG0 (b / boy))");
        let r = smatch_exact(&p, &q).unwrap();
        assert_eq!(r.pred_total, 2);
        assert_eq!(r.precision, 0.0);
    }

    #[test]
    fn label_case_and_quotes_are_normalized() {
        let p = g(r#"(n / name :OP1 "Paris")"#);
        let q = g("(m / name :op1 Paris)");
        assert_eq!(smatch_exact(&p, &q).unwrap().f1, 1.0);
    }

    #[test]
    fn duplicate_edges_count_as_multiset() {
        let p = g("(a / and :op1 (x / x1) :op1 x)");
        let q = g("(a / and :op1 (x / x1))");
        let r = smatch_exact(&p, &q).unwrap();
        assert_eq!((r.matched, r.pred_total, r.gold_total), (4, 5, 4));
        assert_eq!(smatch_exact(&p, &p).unwrap().f1, 1.0);
    }

    #[test]
    fn exact_handles_larger_pred_side() {
        let p = g("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))");
        let q = g("(x / go-02 :ARG0 (y / boy))");
        let r = smatch_exact(&p, &q).unwrap();
        let h = smatch_hill_climb(&p, &q, 8, 3);
        assert_eq!(r.matched, 3);
        assert_eq!(h.matched, 3);
        assert_eq!(r.mapping.get("g").map(String::as_str), Some("x"));
        let swapped = smatch_exact(&q, &p).unwrap();
        assert_eq!(swapped.precision, r.recall);
        assert_eq!(swapped.f1, r.f1);
    }

    #[test]
    fn too_large_for_exact() {
        let mut s = String::from("(r / root");
        for i in 0..9 {
            s.push_str(&format!(" :op{i} (x{i} / thing)"));
        }
        s.push(')');
        let big = g(&s);
        assert_eq!(smatch_exact(&big, &big).unwrap_err(), SmatchError::TooLarge(10));
        assert!(isomorphic(&big, &big));
    }

    #[test]
    fn isomorphism_ignores_names_but_not_structure() {
        let a = g("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))");
        let b = g("(x / want-01 :ARG1 (y / go-02 :ARG0 (z / boy)) :ARG0 z)");
        let c = g("(x / want-01 :ARG1 (y / go-02 :ARG0 (z / boy)) :ARG0 (q / boy))");
        assert!(isomorphic(&a, &b));
        assert!(!isomorphic(&a, &c));
    }

    #[test]
    fn micro_average_sums_then_divides() {
        let mk = |matched, pred_total, gold_total| SmatchResult {
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
            matched,
            pred_total,
            gold_total,
            mapping: BTreeMap::new(),
        };
        let rep = CorpusReport::from_records(vec![mk(3, 4, 4), mk(2, 2, 4)]);
        assert!((rep.precision - 5.0 / 6.0).abs() < 1e-12);
        assert!((rep.recall - 5.0 / 8.0).abs() < 1e-12);
        assert_eq!(rep.n_records, 2);
    }

    #[test]
    fn corpus_checks_counts_and_ids() {
        let a = g("# ::id 1\n(c / cat)");
        let b = g("# ::id 2\n(d / dog)");
        let rep = corpus_smatch(&[b.clone(), a.clone()], &[a.clone(), b.clone()], 4, 0).unwrap();
        assert_eq!(rep.f1, 1.0);
        assert_eq!(
            corpus_smatch(std::slice::from_ref(&a), &[a.clone(), b.clone()], 4, 0).unwrap_err(),
            SmatchError::CountMismatch { pred: 1, gold: 2 }
        );
        let rep = corpus_smatch(std::slice::from_ref(&a), std::slice::from_ref(&a), 4, 0).unwrap();
        assert_eq!(rep.f1, 1.0);
    }
}
