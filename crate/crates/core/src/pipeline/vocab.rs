use std::collections::HashMap;

use super::record::CorpusRecord;
use crate::linearize::{classify, TokenClass};

pub const DEFAULT_MIN_COUNT: usize = 5;

/// `want-01`, `have-org-role-91`: a name, a hyphen, two digits.
pub fn is_frame(concept: &str) -> bool {
    match concept.rsplit_once('-') {
        Some((name, sense)) => {
            !name.is_empty()
                && !name.ends_with('-')
                && !concept.starts_with('"')
                && sense.len() == 2
                && sense.bytes().all(|b| b.is_ascii_digit())
        }
        None => false,
    }
}

/// Relation labels and frame concepts seen at least `min_count` times in
/// the targets, most frequent first, ties in lexicographic order.
pub fn augment_vocab(records: &[CorpusRecord], min_count: usize) -> Vec<String> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for seq in records.iter().filter_map(|r| r.tgt.as_ref()) {
        let toks = seq.tokens();
        for (i, tok) in toks.iter().enumerate() {
            let wanted = match classify(tok) {
                TokenClass::Relation => true,
                TokenClass::Literal => i > 0 && matches!(classify(&toks[i - 1]), TokenClass::Var(_)) && is_frame(tok),
                _ => false,
            };
            if wanted {
                *counts.entry(tok.as_str()).or_default() += 1;
            }
        }
    }
    let mut items: Vec<(&str, usize)> = counts.into_iter().filter(|&(_, c)| c >= min_count).collect();
    items.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    items.into_iter().map(|(t, _)| t.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linearize::LinearSeq;
    use proptest::prelude::*;

    fn corpus(lines: &[&str]) -> Vec<CorpusRecord> {
        lines.iter().enumerate().map(|(i, l)| CorpusRecord::gold(i.to_string(), "s", LinearSeq::from_line(l))).collect()
    }

    #[test]
    fn frames() {
        assert!(is_frame("want-01"));
        assert!(is_frame("have-org-role-91"));
        assert!(!is_frame("boy"));
        assert!(!is_frame("want-1"));
        assert!(!is_frame("-01"));
        assert!(!is_frame("\"x-01\""));
    }

    #[test]
    fn threshold_is_inclusive() {
        let mut lines = vec!["( <V0> want-01 :ARG0 ( <V1> boy ) :ARG0 ( <V2> girl ) )"; 3];
        lines.push("( <V0> want-01 :ARG0 ( <V1> boy ) :ARG9 ( <V2> want-01 ) )");
        lines.push("( <V0> go-02 :ARG9 ( <V1> boy ) )");
        // :ARG0 x7, want-01 x5, :ARG9 x2, go-02 x1
        let v = augment_vocab(&corpus(&lines), DEFAULT_MIN_COUNT);
        assert_eq!(v, vec![":ARG0", "want-01"]);
        assert!(augment_vocab(&[], 5).is_empty());
        assert_eq!(augment_vocab(&corpus(&lines), 2), vec![":ARG0", "want-01", ":ARG9"]);
    }

    #[test]
    fn literal_frames_in_value_position_are_not_counted() {
        let lines = vec!["( <V0> a :mod want-01 )"; 6];
        assert_eq!(augment_vocab(&corpus(&lines), 5), vec![":mod"]);
    }

    proptest! {
        #[test]
        fn output_is_unique_and_meets_bound(picks in prop::collection::vec((0usize..4, 0usize..3), 0..60), min in 1usize..6) {
            let rels = [":ARG0", ":ARG1", ":mod", ":op1"];
            let frames = ["go-01", "see-02", "cat"];
            let lines: Vec<String> = picks.iter().map(|&(r, f)| format!("( <V0> {} {} ( <V1> x ) )", frames[f], rels[r])).collect();
            let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
            let recs = corpus(&refs);
            let v = augment_vocab(&recs, min);
            let mut seen = std::collections::HashSet::new();
            for t in &v {
                prop_assert!(seen.insert(t.clone()));
                let n = lines.iter().map(|l| l.split(' ').filter(|w| w == t).count()).sum::<usize>();
                prop_assert!(n >= min);
            }
        }
    }
}
