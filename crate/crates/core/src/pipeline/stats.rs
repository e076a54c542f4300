use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::record::{CorpusRecord, Lang, Split};

/// Instance counts per language and split.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusStats {
    counts: BTreeMap<(Lang, Split), usize>,
}

fn lang_name(l: Lang) -> &'static str {
    match l {
        Lang::EN => "English(EN)",
        Lang::DE => "German(DE)",
        Lang::ES => "Spanish(ES)",
        Lang::IT => "Italian(IT)",
        Lang::ZH => "Chinese(ZH)",
    }
}

/// `36521` -> `36,521`.
pub fn thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out
}

impl CorpusStats {
    pub fn from_records(records: &[CorpusRecord]) -> Self {
        let mut s = CorpusStats::default();
        for r in records {
            *s.counts.entry((r.lang, r.split)).or_default() += 1;
        }
        s
    }

    pub fn from_counts(counts: impl IntoIterator<Item = ((Lang, Split), usize)>) -> Self {
        CorpusStats { counts: counts.into_iter().collect() }
    }

    pub fn count(&self, lang: Lang, split: Split) -> usize {
        self.counts.get(&(lang, split)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// English rows and the test column are gold quality; everything else
    /// is silver.
    pub fn is_gold_cell(lang: Lang, split: Split) -> bool {
        lang == Lang::EN || split == Split::Test
    }

    pub fn render_table(&self) -> String {
        let mut rows = vec![["Language".to_string(), "Train".to_string(), "Dev".to_string(), "Test".to_string()]];
        for lang in Lang::ALL {
            let mut row = [lang_name(lang).to_string(), String::new(), String::new(), String::new()];
            for (j, split) in Split::ALL.into_iter().enumerate() {
                let mark = if Self::is_gold_cell(lang, split) { "*" } else { "" };
                row[j + 1] = format!("{}{mark}", thousands(self.count(lang, split)));
            }
            rows.push(row);
        }
        let widths: Vec<usize> = (0..4).map(|j| rows.iter().map(|r| r[j].len()).max().unwrap()).collect();
        let mut out = String::new();
        for row in &rows {
            let cells: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out.push_str("* gold quality, otherwise silver\n");
        out
    }

    pub fn to_json(&self) -> Value {
        let mut langs = serde_json::Map::new();
        for lang in Lang::ALL {
            langs.insert(
                lang.code().to_string(),
                json!({
                    "train": self.count(lang, Split::Train),
                    "dev": self.count(lang, Split::Dev),
                    "test": self.count(lang, Split::Test),
                }),
            );
        }
        json!({ "counts": langs, "total": self.total() })
    }
}
