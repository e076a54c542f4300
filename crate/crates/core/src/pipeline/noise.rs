use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adapter::Translator;
use super::record::Lang;
use super::{AdapterError, PipelineError};
use crate::util::mix_seed;

pub const MASK: &str = "<mask>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    None,
    WordDelete,
    MtAdapter,
}

/// Student-input noise. Parsed from `none`, `delete:K` (K percent of the
/// words masked), `mt` (languages assigned round-robin) or `mt:DE`, each
/// optionally followed by `@EPOCH` to resample for that epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub rate: f64,
    pub seed: u64,
    /// Fixed target language for MT noise.
    pub lang: Option<Lang>,
    /// Set to resample the noise for this epoch; unset, every sentence gets
    /// the same noise whenever it is drawn.
    #[serde(default)]
    pub epoch: Option<u64>,
}

impl NoiseSpec {
    pub fn none() -> Self {
        NoiseSpec { kind: NoiseKind::None, rate: 0.0, seed: 0, lang: None, epoch: None }
    }

    pub fn word_delete(rate: f64, seed: u64) -> Self {
        NoiseSpec { kind: NoiseKind::WordDelete, rate, seed, lang: None, epoch: None }
    }

    pub fn mt(lang: Option<Lang>, seed: u64) -> Self {
        NoiseSpec { kind: NoiseKind::MtAdapter, rate: 0.0, seed, lang, epoch: None }
    }

    /// The same noise, redrawn for `epoch`.
    pub fn resampled(self, epoch: u64) -> Self {
        NoiseSpec { epoch: Some(epoch), ..self }
    }

    pub fn parse(text: &str, seed: u64) -> Result<Self, PipelineError> {
        let bad = || PipelineError::Invalid(format!("bad noise spec `{text}` (expected none, mt, mt:LANG or delete:K, optionally @EPOCH)"));
        let (body, epoch) = match text.split_once('@') {
            Some((b, e)) => (b, Some(e.parse::<u64>().map_err(|_| bad())?)),
            None => (text, None),
        };
        let spec = match body.split_once(':') {
            None if body == "none" => NoiseSpec::none(),
            None if body == "mt" => NoiseSpec::mt(None, seed),
            Some(("mt", lang)) => NoiseSpec::mt(Some(lang.parse()?), seed),
            Some(("delete", k)) => {
                let k: f64 = k.trim_end_matches('%').parse().map_err(|_| bad())?;
                NoiseSpec::word_delete(k / 100.0, seed)
            }
            _ => return Err(bad()),
        };
        if !(0.0..=1.0).contains(&spec.rate) {
            return Err(bad());
        }
        Ok(NoiseSpec { epoch, ..spec })
    }

    /// Target language of the `index`-th sentence.
    pub fn language(&self, index: usize) -> Lang {
        match self.kind {
            NoiseKind::MtAdapter => self.lang.unwrap_or(Lang::FOREIGN[index % Lang::FOREIGN.len()]),
            _ => Lang::EN,
        }
    }

    /// Noised version of the `index`-th English sentence and its language.
    /// The result depends only on the spec, the sentence and `index`.
    pub fn apply(&self, sentence: &str, index: usize, translator: &dyn Translator) -> Result<(String, Lang), AdapterError> {
        match self.kind {
            NoiseKind::None => Ok((sentence.to_string(), Lang::EN)),
            NoiseKind::WordDelete => {
                let mut seed = mix_seed(self.seed, index as u64);
                if let Some(e) = self.epoch {
                    seed = mix_seed(seed, e);
                }
                Ok((word_delete(sentence, self.rate, seed), Lang::EN))
            }
            NoiseKind::MtAdapter => {
                let lang = self.language(index);
                let text = match self.epoch {
                    None => translator.translate(sentence, Lang::EN, lang)?,
                    Some(e) => translator.translate_variant(sentence, Lang::EN, lang, e)?,
                };
                Ok((text, lang))
            }
        }
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.lang) {
            (NoiseKind::None, _) => f.write_str("none"),
            (NoiseKind::WordDelete, _) => write!(f, "delete:{}", (self.rate * 1e8).round() / 1e6),
            (NoiseKind::MtAdapter, None) => f.write_str("mt"),
            (NoiseKind::MtAdapter, Some(l)) => write!(f, "mt:{l}"),
        }?;
        match self.epoch {
            Some(e) => write!(f, "@{e}"),
            None => Ok(()),
        }
    }
}

impl FromStr for NoiseSpec {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NoiseSpec::parse(s, 0)
    }
}

/// Number of words masked for `n` words at `rate`: round half away from
/// zero. The epsilon keeps products like 0.15 * 30 on the intended side.
pub fn masked_count(n: usize, rate: f64) -> usize {
    ((rate * n as f64 + 1e-9).round() as usize).min(n)
}

/// Replaces exactly `masked_count(n, rate)` words, chosen uniformly without
/// replacement, by `<mask>`. Words are re-joined with single spaces.
pub fn word_delete(sentence: &str, rate: f64, seed: u64) -> String {
    assert!((0.0..=1.0).contains(&rate), "rate {rate} outside [0, 1]");
    let mut words: Vec<&str> = sentence.split_whitespace().collect();
    let k = masked_count(words.len(), rate);
    if k == 0 {
        return sentence.to_string();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in sample(&mut rng, words.len(), k) {
        words[i] = MASK;
    }
    words.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::adapter::StubAdapter;
    use proptest::prelude::*;

    const TEN: &str = "one two three four five six seven eight nine ten";

    fn masks(s: &str) -> usize {
        s.split_whitespace().filter(|w| *w == MASK).count()
    }

    #[test]
    fn rate_zero_is_identity() {
        assert_eq!(word_delete("a  b c", 0.0, 9), "a  b c");
    }

    #[test]
    fn twenty_percent_of_ten() {
        let out = word_delete(TEN, 0.2, 1);
        assert_eq!(masks(&out), 2);
        assert_eq!(out, word_delete(TEN, 0.2, 1));
    }

    #[test]
    fn rounding_half_away_from_zero() {
        assert_eq!(masked_count(10, 0.15), 2);
        assert_eq!(masked_count(10, 0.25), 3);
        assert_eq!(masked_count(30, 0.15), 5);
        assert_eq!(masked_count(2, 0.2), 0);
        assert_eq!(masked_count(4, 1.0), 4);
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(NoiseSpec::parse("delete:20", 4).unwrap(), NoiseSpec::word_delete(0.2, 4));
        assert_eq!(NoiseSpec::parse("mt:de", 1).unwrap().lang, Some(Lang::DE));
        assert_eq!(NoiseSpec::parse("none", 1).unwrap().kind, NoiseKind::None);
        for bad in ["delete:150", "delete:x", "mt:FR", "swap"] {
            assert!(NoiseSpec::parse(bad, 0).is_err(), "{bad}");
        }
        assert_eq!(NoiseSpec::parse("delete:20", 0).unwrap().to_string(), "delete:20");
    }

    #[test]
    fn identity_noise_keeps_input() {
        let stub = StubAdapter::default();
        assert_eq!(NoiseSpec::none().apply(TEN, 3, &stub).unwrap(), (TEN.to_string(), Lang::EN));
        let (de, lang) = NoiseSpec::mt(None, 0).apply(TEN, 1, &stub).unwrap();
        assert_eq!(lang, Lang::ES);
        assert!(de.starts_with("es"));
    }

    #[test]
    fn resampling_changes_noise_per_epoch() {
        let stub = StubAdapter::new(3);
        let fixed = NoiseSpec::word_delete(0.3, 5);
        let a = fixed.resampled(0).apply(TEN, 0, &stub).unwrap();
        let b = fixed.resampled(1).apply(TEN, 0, &stub).unwrap();
        assert_eq!(a, fixed.resampled(0).apply(TEN, 0, &stub).unwrap());
        assert_ne!(a, b);
        assert_eq!(masks(&a.0), masks(&b.0));
        assert_eq!(fixed.resampled(2).to_string(), "delete:30@2");
        assert_eq!(NoiseSpec::parse("delete:30@2", 5).unwrap(), fixed.resampled(2));
        assert!(NoiseSpec::parse("mt@x", 0).is_err());

        let mt = NoiseSpec::mt(Some(Lang::IT), 0);
        let epochs: Vec<String> = (0..4).map(|e| mt.resampled(e).apply(TEN, 0, &stub).unwrap().0).collect();
        assert!(epochs.iter().any(|t| *t != epochs[0]));
        assert_eq!(mt.apply(TEN, 0, &stub).unwrap(), mt.apply(TEN, 0, &stub).unwrap());
    }

    proptest! {
        #[test]
        fn masks_exact_count_and_keeps_length(words in prop::collection::vec("[a-z]{1,6}", 0..40), pct in 0u32..=100, seed in any::<u64>()) {
            let s = words.join(" ");
            let rate = pct as f64 / 100.0;
            let out = word_delete(&s, rate, seed);
            prop_assert_eq!(out.split_whitespace().count(), words.len());
            prop_assert_eq!(masks(&out), masked_count(words.len(), rate));
            prop_assert_eq!(&out, &word_delete(&s, rate, seed));
        }
    }
}
