//! A smoothed conditional count model small enough to enumerate exactly.
//!
//! Each row of the table is keyed by the previous `order - 1` output tokens
//! and one input feature. The input features are the hashed words of the
//! input sentence plus a bias feature shared by every input. A row gives an
//! additively smoothed distribution over all tokens but BOS; the model's
//! next-token distribution is the uniform mixture of the rows selected by
//! the input's features.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::model::{SeqModel, Vocab};
use super::KdError;
use crate::util::fnv1a;

pub const MODEL_FORMAT: &str = "amrkit-toy-model";
pub const MODEL_VERSION: u32 = 1;

const BIAS_FEATURE: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyConfig {
    /// n-gram order; the context is the previous `order - 1` tokens.
    pub order: usize,
    pub alpha: f64,
    /// Number of hash buckets for input words.
    pub buckets: u64,
}

impl Default for ToyConfig {
    fn default() -> Self {
        ToyConfig { order: 2, alpha: 0.1, buckets: 1 << 20 }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Row {
    counts: HashMap<usize, f64>,
    total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyCondModel {
    vocab: Vocab,
    config: ToyConfig,
    table: HashMap<(Vec<usize>, u64), Row>,
}

impl ToyCondModel {
    pub fn new(vocab: Vocab, config: ToyConfig) -> Result<Self, KdError> {
        if config.order < 1 || !(config.alpha > 0.0) || config.buckets == 0 || !config.alpha.is_finite() {
            return Err(KdError::Format(format!("invalid toy model config {config:?}")));
        }
        Ok(ToyCondModel { vocab, config, table: HashMap::new() })
    }

    pub fn config(&self) -> &ToyConfig {
        &self.config
    }

    /// Number of populated rows.
    pub fn rows(&self) -> usize {
        self.table.len()
    }

    pub fn features(&self, input: &[String]) -> Vec<u64> {
        let mut f: Vec<u64> = input.iter().map(|w| fnv1a(w.as_bytes()) % self.config.buckets).collect();
        f.sort_unstable();
        f.dedup();
        f.push(BIAS_FEATURE);
        f
    }

    fn context(&self, prefix: &[usize]) -> Vec<usize> {
        let n = self.config.order - 1;
        let mut ctx = vec![self.vocab.bos(); n.saturating_sub(prefix.len())];
        ctx.extend_from_slice(&prefix[prefix.len().saturating_sub(n)..]);
        ctx
    }

    /// Adds `weight` to the count of `token` after `prefix` under every
    /// feature of `input`.
    pub fn observe(&mut self, prefix: &[usize], input: &[String], token: usize, weight: f64) {
        assert!(token != self.vocab.bos() && token < self.vocab.len(), "cannot observe token id {token}");
        let ctx = self.context(prefix);
        for f in self.features(input) {
            let row = self.table.entry((ctx.clone(), f)).or_default();
            *row.counts.entry(token).or_default() += weight;
            row.total += weight;
        }
    }

    /// Fractional counts: adds `weight * dist[v]` for every token `v`.
    pub fn observe_dist(&mut self, prefix: &[usize], input: &[String], dist: &[f64], weight: f64) {
        let ctx = self.context(prefix);
        for f in self.features(input) {
            let row = self.table.entry((ctx.clone(), f)).or_default();
            for (v, &p) in dist.iter().enumerate().skip(1) {
                if p > 0.0 {
                    *row.counts.entry(v).or_default() += weight * p;
                    row.total += weight * p;
                }
            }
        }
    }

    /// Teacher-forced counts for a full target sequence.
    pub fn observe_sequence(&mut self, input: &[String], target: &[usize], weight: f64) {
        for t in 0..target.len() {
            self.observe(&target[..t], input, target[t], weight);
        }
    }

    pub fn to_json(&self) -> String {
        let mut rows: Vec<FileRow> = self
            .table
            .iter()
            .map(|((ctx, f), row)| FileRow {
                context: ctx.clone(),
                feature: *f,
                total: row.total,
                counts: row.counts.iter().map(|(&k, &v)| (k, v)).collect::<BTreeMap<_, _>>().into_iter().collect(),
            })
            .collect();
        rows.sort_by(|a, b| (&a.context, a.feature).cmp(&(&b.context, b.feature)));
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            order: self.config.order,
            alpha: self.config.alpha,
            buckets: self.config.buckets,
            vocab: self.vocab.clone(),
            rows,
        };
        serde_json::to_string(&file).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, KdError> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| KdError::Format(e.to_string()))?;
        if file.format != MODEL_FORMAT {
            return Err(KdError::Format(format!("not a toy model file (format `{}`)", file.format)));
        }
        if file.version != MODEL_VERSION {
            return Err(KdError::Format(format!("unsupported model version {}", file.version)));
        }
        let config = ToyConfig { order: file.order, alpha: file.alpha, buckets: file.buckets };
        let mut model = ToyCondModel::new(file.vocab, config)?;
        for r in file.rows {
            if r.context.len() != config.order - 1 || r.context.iter().any(|&t| t >= model.vocab.len()) {
                return Err(KdError::Format("row context does not match the model order or vocabulary".into()));
            }
            let mut row = Row::default();
            for (tok, c) in r.counts {
                if tok == 0 || tok >= model.vocab.len() || !(c >= 0.0) || !c.is_finite() {
                    return Err(KdError::Format(format!("bad count entry ({tok}, {c})")));
                }
                row.counts.insert(tok, c);
            }
            let sum: f64 = row.counts.values().sum();
            if !(r.total.is_finite() && (r.total - sum).abs() <= 1e-9 * sum.max(1.0)) {
                return Err(KdError::Format(format!("row total {} does not match its counts", r.total)));
            }
            row.total = r.total;
            model.table.insert((r.context, r.feature), row);
        }
        Ok(model)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    order: usize,
    alpha: f64,
    buckets: u64,
    vocab: Vocab,
    rows: Vec<FileRow>,
}

#[derive(Serialize, Deserialize)]
struct FileRow {
    context: Vec<usize>,
    feature: u64,
    total: f64,
    counts: Vec<(usize, f64)>,
}

impl SeqModel for ToyCondModel {
    fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    fn next_dist(&self, prefix: &[usize], input: &[String]) -> Vec<f64> {
        let v = self.vocab.len();
        let outputs = (v - 1) as f64;
        let alpha = self.config.alpha;
        let ctx = self.context(prefix);
        let feats = self.features(input);
        let share = 1.0 / feats.len() as f64;
        let mut dist = vec![0.0; v];
        let mut key = (ctx, 0u64);
        for f in feats {
            key.1 = f;
            let row = self.table.get(&key);
            let total = row.map_or(0.0, |r| r.total);
            let denom = total + alpha * outputs;
            let base = share * alpha / denom;
            for p in dist.iter_mut().skip(1) {
                *p += base;
            }
            if let Some(row) = row {
                for (&tok, &c) in &row.counts {
                    dist[tok] += share * c / denom;
                }
            }
        }
        dist
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn model() -> ToyCondModel {
        ToyCondModel::new(Vocab::new(["a", "b", "c"]), ToyConfig::default()).unwrap()
    }

    #[test]
    fn untrained_model_is_uniform_over_outputs() {
        let m = model();
        let d = m.next_dist(&[], &words("hello"));
        assert_eq!(d[0], 0.0);
        for p in &d[1..] {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn distributions_normalize_after_training() {
        let mut m = model();
        m.observe_sequence(&words("x y"), &[2, 3, 1], 1.0);
        m.observe_dist(&[2], &words("y z"), &[0.0, 0.1, 0.2, 0.3, 0.4], 2.0);
        for prefix in [&[][..], &[2], &[2, 3], &[4, 4, 4]] {
            for input in ["x y", "y z", "q", ""] {
                let d = m.next_dist(prefix, &words(input));
                let s: f64 = d.iter().sum();
                assert!((s - 1.0).abs() < 1e-9, "{s}");
                assert!(d.iter().all(|&p| p >= 0.0));
            }
        }
    }

    #[test]
    fn closed_form_after_repeated_pair() {
        let mut m = model();
        let x = words("the boy");
        let y = [2, 3, 4, 1];
        let reps = 7.0;
        for _ in 0..7 {
            m.observe_sequence(&x, &y, 1.0);
        }
        // every row selected for this input saw the target exactly `reps` times
        let expected = (reps + 0.1) / (reps + 0.1 * 4.0);
        for t in 0..y.len() {
            let d = m.next_dist(&y[..t], &x);
            assert!((d[y[t]] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn context_order() {
        let mut m = ToyCondModel::new(Vocab::new(["a", "b"]), ToyConfig { order: 1, ..Default::default() }).unwrap();
        m.observe(&[2, 3], &[], 2, 1.0);
        assert_eq!(m.rows(), 1);
        let d1 = m.next_dist(&[], &[]);
        let d2 = m.next_dist(&[3, 3, 3], &[]);
        assert_eq!(d1, d2);
        assert!(ToyCondModel::new(Vocab::new(["a"]), ToyConfig { order: 0, ..Default::default() }).is_err());
        assert!(ToyCondModel::new(Vocab::new(["a"]), ToyConfig { alpha: 0.0, ..Default::default() }).is_err());
    }

    #[test]
    fn json_round_trip_is_stable() {
        let mut m = model();
        m.observe_sequence(&words("x y"), &[2, 3, 1], 1.0);
        m.observe_sequence(&words("z"), &[4, 1], 0.5);
        let text = m.to_json();
        let back = ToyCondModel::from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), text);
        assert!(text.starts_with(r#"{"format":"amrkit-toy-model","version":1"#));
        let bumped = text.replace(r#""version":1"#, r#""version":9"#);
        assert!(matches!(ToyCondModel::from_json(&bumped), Err(KdError::Format(_))));
    }
}
