use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::PipelineError;
use crate::linearize::LinearSeq;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Lang {
    EN,
    DE,
    ES,
    IT,
    ZH,
}

impl Lang {
    pub const ALL: [Lang; 5] = [Lang::EN, Lang::DE, Lang::ES, Lang::IT, Lang::ZH];
    /// The zero-resource languages.
    pub const FOREIGN: [Lang; 4] = [Lang::DE, Lang::ES, Lang::IT, Lang::ZH];

    pub fn code(self) -> &'static str {
        match self {
            Lang::EN => "EN",
            Lang::DE => "DE",
            Lang::ES => "ES",
            Lang::IT => "IT",
            Lang::ZH => "ZH",
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Lang {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Lang::ALL
            .into_iter()
            .find(|l| l.code().eq_ignore_ascii_case(s))
            .ok_or_else(|| PipelineError::Invalid(format!("unknown language `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    #[default]
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "gold")]
    Gold,
    #[serde(rename = "silver-mt")]
    SilverMt,
    #[serde(rename = "seq-kd")]
    SeqKd,
}

/// One line of a JSONL corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub lang: Lang,
    #[serde(default)]
    pub split: Split,
    pub src: String,
    #[serde(default, serialize_with = "ser_tgt", deserialize_with = "de_tgt")]
    pub tgt: Option<LinearSeq>,
    pub provenance: Provenance,
    #[serde(default)]
    pub quality: Option<f64>,
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
}

/// Metadata key holding the English original of a translated or noised
/// source.
pub const META_EN: &str = "en";
pub const META_NOISE: &str = "noise";

fn ser_tgt<S: Serializer>(tgt: &Option<LinearSeq>, s: S) -> Result<S::Ok, S::Error> {
    match tgt {
        Some(seq) => s.serialize_some(&seq.to_string()),
        None => s.serialize_none(),
    }
}

fn de_tgt<'de, D: Deserializer<'de>>(d: D) -> Result<Option<LinearSeq>, D::Error> {
    Ok(Option::<String>::deserialize(d)?.map(|line| LinearSeq::from_line(&line)))
}

impl CorpusRecord {
    pub fn gold(id: impl Into<String>, src: impl Into<String>, tgt: LinearSeq) -> Self {
        CorpusRecord {
            id: id.into(),
            lang: Lang::EN,
            split: Split::Train,
            src: src.into(),
            tgt: Some(tgt),
            provenance: Provenance::Gold,
            quality: None,
            meta: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.provenance == Provenance::Gold && (self.lang != Lang::EN || self.tgt.is_none()) {
            return Err(PipelineError::Invalid(format!("record {}: gold records must be EN with a target", self.id)));
        }
        if let Some(q) = self.quality {
            if !(-1.0..=1.0).contains(&q) {
                return Err(PipelineError::Invalid(format!("record {}: quality {q} outside [-1, 1]", self.id)));
            }
        }
        Ok(())
    }

    /// The English sentence this record derives from.
    pub fn english(&self) -> Option<&str> {
        match self.meta.get(META_EN) {
            Some(en) => Some(en),
            None if self.lang == Lang::EN => Some(&self.src),
            None => None,
        }
    }
}

pub fn read_jsonl(text: &str) -> Result<Vec<CorpusRecord>, PipelineError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: CorpusRecord =
            serde_json::from_str(line).map_err(|e| PipelineError::Invalid(format!("line {}: {e}", i + 1)))?;
        rec.validate().map_err(|e| PipelineError::Invalid(format!("line {}: {e}", i + 1)))?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_jsonl(records: &[CorpusRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_round_trip() {
        let mut r = CorpusRecord::gold("g1", "The boy wants to go.", LinearSeq::from_line("( <V0> want-01 :ARG0 ( <V1> boy ) )"));
        r.meta.insert("note".into(), "x".into());
        let text = write_jsonl(&[r.clone()]);
        assert!(text.contains(r#""tgt":"( <V0> want-01 :ARG0 ( <V1> boy ) )""#));
        assert!(text.contains(r#""provenance":"gold""#));
        assert_eq!(read_jsonl(&text).unwrap(), vec![r]);
    }

    #[test]
    fn gold_must_be_english_with_target() {
        let mut r = CorpusRecord::gold("g", "x", LinearSeq::from_line("( <V0> a )"));
        r.lang = Lang::DE;
        assert!(r.validate().is_err());
        let line = r#"{"id":"s","lang":"DE","src":"x","provenance":"silver-mt","quality":1.5}"#;
        assert!(read_jsonl(line).is_err());
        let line = r#"{"id":"s","lang":"DE","src":"x","provenance":"silver-mt","quality":0.5}"#;
        let recs = read_jsonl(line).unwrap();
        assert_eq!(recs[0].split, Split::Train);
        assert_eq!(recs[0].english(), None);
    }
}
