//! Translation and sentence-embedding backends.
//!
//! [`StubAdapter`] is a deterministic stand-in that needs no models: its
//! "translation" tags each word with the target language, garbles or drops
//! a hashed fraction of words (a whole sentence is occasionally bad), and
//! its embedding is a signed hashed bag of words. [`CommandAdapter`] talks
//! JSON to an external program.

use std::io::Write;
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::record::Lang;
use super::AdapterError;
use crate::util::{fnv1a, fnv1a_parts, mix_seed};

/// Environment variable naming the external adapter command.
pub const ADAPTER_ENV: &str = "AMRKIT_ADAPTER_CMD";
pub const EMBED_DIM: usize = 64;

pub trait Translator: Sync {
    fn translate(&self, text: &str, from: Lang, to: Lang) -> Result<String, AdapterError>;

    /// The `variant`-th alternative translation, for noise resampled per
    /// epoch. Backends without sampling return the fixed translation.
    fn translate_variant(&self, text: &str, from: Lang, to: Lang, variant: u64) -> Result<String, AdapterError> {
        let _ = variant;
        self.translate(text, from, to)
    }
}

/// Must be pure: the same sentence and language give the same vector.
pub trait EmbeddingProvider: Sync {
    fn embed(&self, sentence: &str, lang: Lang) -> Result<Vec<f64>, AdapterError>;
}

/// Cosine similarity; 0 when either vector is zero.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StubAdapter {
    pub seed: u64,
}

fn prefix(lang: Lang) -> String {
    lang.code().to_ascii_lowercase()
}

/// `de:word` -> `word`; other tokens unchanged.
fn strip_lang(tok: &str) -> &str {
    match tok.split_once(':') {
        Some((p, w)) if p.len() == 2 && p.bytes().all(|b| b.is_ascii_lowercase()) && !w.is_empty() => w,
        _ => tok,
    }
}

impl StubAdapter {
    pub fn new(seed: u64) -> Self {
        StubAdapter { seed }
    }

    fn to_foreign(&self, text: &str, to: Lang) -> String {
        let p = prefix(to);
        let h = fnv1a_parts(&[&self.seed.to_string(), to.code(), text]);
        let bad = h % 10 == 0;
        let (garble, drop) = if bad { (40, 60) } else { (4, 7) };
        let mut out: Vec<String> = Vec::new();
        for (i, w) in text.split_whitespace().enumerate() {
            let r = mix_seed(h, i as u64);
            match r % 100 {
                x if x < garble => out.push(format!("{p}~{:04x}", (r >> 32) & 0xffff)),
                x if x < drop => {}
                _ => out.push(format!("{p}:{w}")),
            }
        }
        if out.is_empty() {
            if let Some(w) = text.split_whitespace().next() {
                out.push(format!("{p}:{w}"));
            }
        }
        out.join(" ")
    }
}

impl Translator for StubAdapter {
    fn translate(&self, text: &str, from: Lang, to: Lang) -> Result<String, AdapterError> {
        Ok(match (from, to) {
            _ if from == to => text.to_string(),
            (Lang::EN, _) => self.to_foreign(text, to),
            (_, Lang::EN) => text.split_whitespace().map(strip_lang).collect::<Vec<_>>().join(" "),
            _ => {
                let en = self.translate(text, from, Lang::EN)?;
                self.to_foreign(&en, to)
            }
        })
    }

    fn translate_variant(&self, text: &str, from: Lang, to: Lang, variant: u64) -> Result<String, AdapterError> {
        StubAdapter::new(mix_seed(self.seed, variant.wrapping_add(1))).translate(text, from, to)
    }
}

impl EmbeddingProvider for StubAdapter {
    fn embed(&self, sentence: &str, _lang: Lang) -> Result<Vec<f64>, AdapterError> {
        let mut v = vec![0.0; EMBED_DIM];
        for tok in sentence.split_whitespace() {
            let w = strip_lang(tok).to_lowercase();
            let h = fnv1a(w.as_bytes());
            for k in 0..2 {
                let hk = mix_seed(h, k);
                let sign = if hk >> 63 == 0 { 1.0 } else { -1.0 };
                v[(hk % EMBED_DIM as u64) as usize] += sign;
            }
        }
        Ok(v)
    }
}

/// Runs `sh -c <command>` once per request, writing one JSON object to its
/// stdin and reading one JSON object from its stdout.
///
/// Requests: `{"op":"translate","text":..,"from":"EN","to":"DE"}` answered
/// by `{"text":..}`, and `{"op":"embed","text":..,"lang":"DE"}` answered by
/// `{"vector":[..]}`.
#[derive(Debug, Clone)]
pub struct CommandAdapter {
    pub command: String,
}

#[derive(Deserialize, Serialize)]
struct Reply {
    text: Option<String>,
    vector: Option<Vec<f64>>,
}

impl CommandAdapter {
    pub fn new(command: impl Into<String>) -> Self {
        CommandAdapter { command: command.into() }
    }

    pub fn from_env() -> Option<Self> {
        std::env::var(ADAPTER_ENV).ok().filter(|c| !c.trim().is_empty()).map(CommandAdapter::new)
    }

    fn call(&self, request: serde_json::Value) -> Result<Reply, AdapterError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| AdapterError::Spawn(e.to_string()))?;
        {
            let mut stdin = child.stdin.take().expect("stdin is piped");
            // a command that ignores its input may close the pipe early
            let _ = stdin.write_all(request.to_string().as_bytes());
        }
        let out = child.wait_with_output().map_err(|e| AdapterError::Spawn(e.to_string()))?;
        if !out.status.success() {
            return Err(AdapterError::Failed {
                status: out.status.code().unwrap_or(-1),
                stderr: String::from_utf8_lossy(&out.stderr).trim().to_string(),
            });
        }
        serde_json::from_slice(&out.stdout).map_err(|e| AdapterError::Protocol(e.to_string()))
    }
}

impl Translator for CommandAdapter {
    fn translate(&self, text: &str, from: Lang, to: Lang) -> Result<String, AdapterError> {
        let reply = self.call(json!({"op": "translate", "text": text, "from": from, "to": to}))?;
        reply.text.ok_or_else(|| AdapterError::Protocol("reply has no `text`".into()))
    }
}

impl EmbeddingProvider for CommandAdapter {
    fn embed(&self, sentence: &str, lang: Lang) -> Result<Vec<f64>, AdapterError> {
        let reply = self.call(json!({"op": "embed", "text": sentence, "lang": lang}))?;
        match reply.vector {
            Some(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => Ok(v),
            _ => Err(AdapterError::Protocol("reply has no usable `vector`".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_fixtures() {
        assert!((cosine(&[1.0, 2.0], &[1.0, 2.0]) - 1.0).abs() < 1e-15);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 3.0]), 0.0);
        assert_eq!(cosine(&[1.0, 0.0], &[-2.0, 0.0]), -1.0);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]), 0.0);
    }

    #[test]
    fn stub_translation_is_deterministic_and_invertible_on_kept_words() {
        let s = StubAdapter::new(3);
        let en = "the boy wants the girl to believe him";
        let de = s.translate(en, Lang::EN, Lang::DE).unwrap();
        assert_eq!(de, s.translate(en, Lang::EN, Lang::DE).unwrap());
        assert!(de.split_whitespace().all(|t| t.starts_with("de:") || t.starts_with("de~")));
        let back = s.translate(&de, Lang::DE, Lang::EN).unwrap();
        for w in back.split_whitespace().filter(|w| !w.starts_with("de~")) {
            assert!(en.split_whitespace().any(|e| e == w));
        }
        assert_eq!(s.translate(en, Lang::EN, Lang::EN).unwrap(), en);
    }

    #[test]
    fn stub_embedding_ignores_language_tags() {
        let s = StubAdapter::default();
        let a = s.embed("the boy", Lang::EN).unwrap();
        let b = s.embed("de:the de:boy", Lang::DE).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), EMBED_DIM);
    }

    #[test]
    fn command_adapter_round_trip() {
        let t = CommandAdapter::new(r#"cat >/dev/null; echo '{"text":"hallo","vector":[1.0,0.0]}'"#);
        assert_eq!(t.translate("hello", Lang::EN, Lang::DE).unwrap(), "hallo");
        assert_eq!(t.embed("hello", Lang::EN).unwrap(), vec![1.0, 0.0]);
        let bad = CommandAdapter::new("exit 3");
        assert!(matches!(bad.translate("x", Lang::EN, Lang::DE), Err(AdapterError::Failed { status: 3, .. })));
        let garbage = CommandAdapter::new("echo nope");
        assert!(matches!(garbage.embed("x", Lang::EN), Err(AdapterError::Protocol(_))));
    }
}
