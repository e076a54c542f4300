use std::collections::BTreeMap;

use log::warn;
use rayon::prelude::*;

use super::model::SeqModel;
use super::search::beam_search;
use crate::pipeline::{CorpusRecord, NoiseSpec, Provenance, Split, Translator, META_EN, META_NOISE};
use crate::repair::repair;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildConfig {
    pub beam_size: usize,
    pub max_len: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig { beam_size: 5, max_len: 64 }
    }
}

/// Sequence-level distillation data.
///
/// For every `(id, english)` input the teacher's beam-search mode becomes
/// the (repaired) target, and the student input is the noised English
/// sentence. Inputs whose noise adapter fails are logged and skipped; the
/// remaining records keep input order.
pub fn seq_kd_build(
    teacher: &dyn SeqModel,
    inputs: &[(String, String)],
    noise: &NoiseSpec,
    translator: &dyn Translator,
    config: &BuildConfig,
) -> Vec<CorpusRecord> {
    inputs
        .par_iter()
        .enumerate()
        .map(|(i, (id, english))| {
            let x_star: Vec<String> = english.split_whitespace().map(String::from).collect();
            let (src, lang) = match noise.apply(english, i, translator) {
                Ok(v) => v,
                Err(e) => {
                    warn!("skipping {id}: {e}");
                    return None;
                }
            };
            let best = beam_search(teacher, &x_star, config.beam_size, config.max_len).into_iter().next();
            let tokens = best.map(|h| teacher.vocab().decode(&h.tokens)).unwrap_or_default();
            let mut meta = BTreeMap::new();
            meta.insert(META_EN.to_string(), english.clone());
            meta.insert(META_NOISE.to_string(), noise.to_string());
            Some(CorpusRecord {
                id: id.clone(),
                lang,
                split: Split::Train,
                src,
                tgt: Some(repair(&tokens)),
                provenance: Provenance::SeqKd,
                quality: None,
                meta,
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kd::model::Vocab;
    use crate::kd::toy::{ToyCondModel, ToyConfig};
    use crate::linearize::delinearize;
    use crate::pipeline::{AdapterError, Lang, StubAdapter};

    fn teacher() -> ToyCondModel {
        let vocab = Vocab::new(["(", ")", "<V0>", "<V1>", "boy", "want-01", ":ARG0"]);
        let mut m = ToyCondModel::new(vocab.clone(), ToyConfig { order: 3, ..Default::default() }).unwrap();
        let y = vocab.encode(&["(", "<V0>", "want-01", ":ARG0", "(", "<V1>", "boy", ")", ")", "</s>"]).unwrap();
        for _ in 0..50 {
            m.observe_sequence(&["the".into(), "boy".into(), "wants".into()], &y, 1.0);
        }
        m
    }

    fn inputs(n: usize) -> Vec<(String, String)> {
        (0..n).map(|i| (format!("s{i}"), "the boy wants".to_string())).collect()
    }

    #[test]
    fn identity_noise_and_greedy_targets() {
        let t = teacher();
        let out = seq_kd_build(&t, &inputs(3), &NoiseSpec::none(), &StubAdapter::default(), &BuildConfig::default());
        assert_eq!(out.len(), 3);
        for r in &out {
            assert_eq!(r.src, "the boy wants");
            assert_eq!(r.tgt.as_ref().unwrap().to_string(), "( <V0> want-01 :ARG0 ( <V1> boy ) )");
            assert_eq!(r.provenance, Provenance::SeqKd);
            assert_eq!(r.meta[META_NOISE], "none");
        }
        assert_eq!(out.iter().map(|r| r.id.as_str()).collect::<Vec<_>>(), ["s0", "s1", "s2"]);
    }

    #[test]
    fn untrained_teacher_still_gives_valid_targets() {
        let t = ToyCondModel::new(teacher().vocab().clone(), ToyConfig::default()).unwrap();
        let noise = NoiseSpec::word_delete(0.2, 7);
        let out = seq_kd_build(&t, &inputs(20), &noise, &StubAdapter::default(), &BuildConfig { beam_size: 3, max_len: 12 });
        assert_eq!(out.len(), 20);
        assert!(out.iter().all(|r| delinearize(r.tgt.as_ref().unwrap()).is_ok()));
    }

    struct Flaky;

    impl Translator for Flaky {
        fn translate(&self, text: &str, _: Lang, _: Lang) -> Result<String, AdapterError> {
            if text.len() % 2 == 0 {
                Err(AdapterError::Failed { status: 1, stderr: "boom".into() })
            } else {
                Ok(text.to_string())
            }
        }
    }

    #[test]
    fn adapter_failures_skip_records() {
        let t = teacher();
        let inputs = vec![("a".to_string(), "odd".to_string()), ("b".into(), "even".into()), ("c".into(), "x".into())];
        let out = seq_kd_build(&t, &inputs, &NoiseSpec::mt(Some(Lang::DE), 0), &Flaky, &BuildConfig::default());
        assert_eq!(out.iter().map(|r| r.id.as_str()).collect::<Vec<_>>(), ["a", "c"]);
        assert!(out.iter().all(|r| r.lang == Lang::DE));
    }
}
