use std::cmp::Ordering;

use serde::Serialize;

use super::model::SeqModel;
use super::KdError;

/// Upper bound on `output_size ^ max_len` for the enumeration oracles.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamHypothesis {
    /// Output tokens, ending with EOS once finished.
    pub tokens: Vec<usize>,
    pub log_prob: f64,
    pub finished: bool,
}

/// Higher log-probability first, then lexicographic token ids (a proper
/// prefix sorts first).
fn rank(a_lp: f64, a: &[usize], b_lp: f64, b: &[usize]) -> Ordering {
    b_lp.total_cmp(&a_lp).then_with(|| a.cmp(b))
}

/// Length-unnormalized beam search.
///
/// `max_len` bounds the total number of output tokens including EOS: at the
/// last step only EOS may be emitted (with its model probability). Finished
/// hypotheses leave the beam but keep their slot, so the search ends once
/// `beam_size` hypotheses have finished or none remain alive.
pub fn beam_search(model: &dyn SeqModel, input: &[String], beam_size: usize, max_len: usize) -> Vec<BeamHypothesis> {
    assert!(beam_size >= 1 && max_len >= 1, "beam_size and max_len must be positive");
    let eos = model.vocab().eos();
    let mut alive: Vec<(Vec<usize>, f64)> = vec![(Vec::new(), 0.0)];
    let mut finished: Vec<BeamHypothesis> = Vec::new();

    for step in 0..max_len {
        let last = step + 1 == max_len;
        let mut cands: Vec<(Vec<usize>, f64)> = Vec::new();
        for (prefix, lp) in &alive {
            let dist = model.next_dist(prefix, input);
            for (tok, &p) in dist.iter().enumerate().skip(1) {
                if p <= 0.0 || (last && tok != eos) {
                    continue;
                }
                let mut toks = prefix.clone();
                toks.push(tok);
                cands.push((toks, lp + p.ln()));
            }
        }
        cands.sort_by(|a, b| rank(a.1, &a.0, b.1, &b.0));

        let slots = beam_size - finished.len();
        alive.clear();
        for (toks, lp) in cands.into_iter().take(slots) {
            if toks.last() == Some(&eos) {
                finished.push(BeamHypothesis { tokens: toks, log_prob: lp, finished: true });
            } else {
                alive.push((toks, lp));
            }
        }
        if alive.is_empty() {
            break;
        }
    }
    finished.sort_by(|a, b| rank(a.log_prob, &a.tokens, b.log_prob, &b.tokens));
    finished
}

fn check_size(model: &dyn SeqModel, max_len: usize) -> Result<(), KdError> {
    let base = model.vocab().output_size() as u128;
    let mut total: u128 = 1;
    for _ in 0..max_len {
        total = total.saturating_mul(base);
    }
    if total > ENUMERATION_LIMIT {
        return Err(KdError::TooLarge(total));
    }
    Ok(())
}

/// Depth-first walk over every EOS-terminated sequence of at most `max_len`
/// tokens with positive probability, in lexicographic order.
fn walk(model: &dyn SeqModel, input: &[String], max_len: usize, prefix: &mut Vec<usize>, lp: f64, visit: &mut dyn FnMut(&[usize], f64)) {
    let eos = model.vocab().eos();
    let last = prefix.len() + 1 == max_len;
    let dist = model.next_dist(prefix, input);
    for (tok, &p) in dist.iter().enumerate().skip(1) {
        if p <= 0.0 || (last && tok != eos) {
            continue;
        }
        prefix.push(tok);
        if tok == eos {
            visit(prefix, lp + p.ln());
        } else {
            walk(model, input, max_len, prefix, lp + p.ln(), visit);
        }
        prefix.pop();
    }
}

/// All complete sequences with their log-probabilities.
pub fn enumerate_sequences(model: &dyn SeqModel, input: &[String], max_len: usize) -> Result<Vec<(Vec<usize>, f64)>, KdError> {
    check_size(model, max_len)?;
    let mut out = Vec::new();
    if max_len > 0 {
        walk(model, input, max_len, &mut Vec::new(), 0.0, &mut |toks, lp| out.push((toks.to_vec(), lp)));
    }
    Ok(out)
}

/// The most probable complete sequence (ties: lexicographically smallest).
pub fn exact_mode(model: &dyn SeqModel, input: &[String], max_len: usize) -> Result<Vec<usize>, KdError> {
    let all = enumerate_sequences(model, input, max_len)?;
    all.into_iter()
        .min_by(|a, b| rank(a.1, &a.0, b.1, &b.0))
        .map(|(toks, _)| toks)
        .ok_or(KdError::ZeroProbability { step: 0, token: model.vocab().token(model.vocab().eos()).to_string() })
}

/// KL(student || teacher) between the distributions over complete
/// sequences of at most `max_len` tokens. Both distributions are
/// renormalized over that set, since the length cap discards the mass of
/// longer sequences.
pub fn exact_seq_kl(
    student: &dyn SeqModel,
    teacher: &dyn SeqModel,
    input: &[String],
    teacher_input: &[String],
    max_len: usize,
) -> Result<f64, KdError> {
    if student.vocab() != teacher.vocab() {
        return Err(KdError::VocabMismatch);
    }
    check_size(student, max_len)?;
    let mut acc = SeqKl { zs: 0.0, zt: 0.0, cross: 0.0 };
    if max_len > 0 {
        seq_kl_walk(student, teacher, input, teacher_input, max_len, &mut Vec::new(), 0.0, 0.0, &mut acc)?;
    }
    if acc.zs == 0.0 {
        return Ok(0.0);
    }
    let kl = acc.cross / acc.zs - acc.zs.ln() + acc.zt.ln();
    Ok(kl.max(0.0))
}

struct SeqKl {
    zs: f64,
    zt: f64,
    cross: f64,
}

#[allow(clippy::too_many_arguments)]
fn seq_kl_walk(
    student: &dyn SeqModel,
    teacher: &dyn SeqModel,
    input: &[String],
    teacher_input: &[String],
    max_len: usize,
    prefix: &mut Vec<usize>,
    lps: f64,
    lpt: f64,
    acc: &mut SeqKl,
) -> Result<(), KdError> {
    let eos = student.vocab().eos();
    let last = prefix.len() + 1 == max_len;
    let ps = student.next_dist(prefix, input);
    let pt = teacher.next_dist(prefix, teacher_input);
    for tok in 1..ps.len() {
        if last && tok != eos {
            continue;
        }
        if ps[tok] <= 0.0 {
            // teacher mass here only enters through its normalizer
            if pt[tok] > 0.0 {
                acc.zt += teacher_mass(teacher, teacher_input, max_len, prefix, tok, lpt + pt[tok].ln());
            }
            continue;
        }
        if pt[tok] <= 0.0 {
            return Err(KdError::SupportMismatch { step: prefix.len(), token: student.vocab().token(tok).to_string() });
        }
        let (s, t) = (lps + ps[tok].ln(), lpt + pt[tok].ln());
        prefix.push(tok);
        if tok == eos {
            let w = s.exp();
            acc.zs += w;
            acc.zt += t.exp();
            acc.cross += w * (s - t);
        } else {
            seq_kl_walk(student, teacher, input, teacher_input, max_len, prefix, s, t, acc)?;
        }
        prefix.pop();
    }
    Ok(())
}

/// Total teacher probability of the complete sequences below `prefix + tok`.
fn teacher_mass(teacher: &dyn SeqModel, input: &[String], max_len: usize, prefix: &mut Vec<usize>, tok: usize, lp: f64) -> f64 {
    if tok == teacher.vocab().eos() {
        return lp.exp();
    }
    prefix.push(tok);
    let mut total = 0.0;
    walk(teacher, input, max_len, prefix, lp, &mut |_, l| total += l.exp());
    prefix.pop();
    total
}
