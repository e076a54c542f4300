use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::KdError;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

/// Ordered token set. Id 0 is always [`BOS`] and id 1 is [`EOS`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Vocab {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocab {
    pub fn new<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut v = Vocab { tokens: Vec::new(), index: HashMap::new() };
        for t in [BOS.to_string(), EOS.to_string()].into_iter().chain(tokens.into_iter().map(Into::into)) {
            if !v.index.contains_key(&t) {
                v.index.insert(t.clone(), v.tokens.len());
                v.tokens.push(t);
            }
        }
        v
    }

    pub fn bos(&self) -> usize {
        0
    }

    pub fn eos(&self) -> usize {
        1
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Tokens a model can emit: everything but BOS.
    pub fn output_size(&self) -> usize {
        self.tokens.len() - 1
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: usize) -> &str {
        &self.tokens[id]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Vec<usize>, KdError> {
        tokens
            .iter()
            .map(|t| self.id(t.as_ref()).ok_or_else(|| KdError::UnknownToken(t.as_ref().to_string())))
            .collect()
    }

    /// Token strings for ids, without BOS/EOS.
    pub fn decode(&self, ids: &[usize]) -> Vec<String> {
        ids.iter().filter(|&&i| i > 1).map(|&i| self.tokens[i].clone()).collect()
    }
}

impl TryFrom<Vec<String>> for Vocab {
    type Error = KdError;

    fn try_from(tokens: Vec<String>) -> Result<Self, KdError> {
        if tokens.first().map(String::as_str) != Some(BOS) || tokens.get(1).map(String::as_str) != Some(EOS) {
            return Err(KdError::Format(format!("vocabulary must start with {BOS} {EOS}")));
        }
        let v = Vocab::new(tokens.iter().skip(2).cloned());
        if v.len() != tokens.len() {
            return Err(KdError::Format("duplicate vocabulary entries".into()));
        }
        Ok(v)
    }
}

impl From<Vocab> for Vec<String> {
    fn from(v: Vocab) -> Self {
        v.tokens
    }
}

/// Next-token distribution `p(y_t | y_<t, x)`.
///
/// `prefix` holds the tokens generated so far (BOS excluded); `input` is the
/// tokenized source sentence. The returned vector is indexed by vocabulary
/// id, non-negative, and sums to 1. Implementations are queried
/// concurrently and must depend only on `(prefix, input)`.
pub trait SeqModel: Sync {
    fn vocab(&self) -> &Vocab;

    fn next_dist(&self, prefix: &[usize], input: &[String]) -> Vec<f64>;
}

impl<M: SeqModel + ?Sized> SeqModel for &M {
    fn vocab(&self) -> &Vocab {
        (**self).vocab()
    }

    fn next_dist(&self, prefix: &[usize], input: &[String]) -> Vec<f64> {
        (**self).next_dist(prefix, input)
    }
}
