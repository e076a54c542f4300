use log::{debug, warn};
use rayon::prelude::*;
use serde::Serialize;

use super::adapter::{cosine, EmbeddingProvider, Translator};
use super::record::{CorpusRecord, Lang};

/// Shipped default; not a recommended value, just a reasonable one for the
/// stub embeddings.
pub const DEFAULT_THRESHOLD: f64 = 0.85;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dropped {
    pub record: CorpusRecord,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FilterOutcome {
    pub kept: Vec<CorpusRecord>,
    pub dropped: Vec<Dropped>,
}

enum Verdict {
    Keep(CorpusRecord),
    Drop(Dropped),
}

/// Back-translation consistency filter.
///
/// Each foreign record is translated back to English and scored by the
/// cosine between the embeddings of its English original (the `en` meta
/// field) and of the back-translation. Records scoring at least
/// `threshold` are kept; both sides carry the score in `quality`. English
/// records need no check and pass through untouched. Adapter failures drop
/// the record with the error as reason. Output order follows input order.
pub fn bt_filter(
    records: &[CorpusRecord],
    provider: &dyn EmbeddingProvider,
    bt: &dyn Translator,
    threshold: f64,
) -> FilterOutcome {
    let verdicts: Vec<Verdict> = records.par_iter().map(|r| judge(r, provider, bt, threshold)).collect();
    let mut out = FilterOutcome::default();
    for v in verdicts {
        match v {
            Verdict::Keep(r) => out.kept.push(r),
            Verdict::Drop(d) => {
                // low similarity is routine; a failed adapter call is not
                if d.record.quality.is_some() {
                    debug!("dropped record {}: {}", d.record.id, d.reason);
                } else {
                    warn!("dropped record {}: {}", d.record.id, d.reason);
                }
                out.dropped.push(d)
            }
        }
    }
    out
}

fn judge(record: &CorpusRecord, provider: &dyn EmbeddingProvider, bt: &dyn Translator, threshold: f64) -> Verdict {
    if record.lang == Lang::EN {
        return Verdict::Keep(record.clone());
    }
    let drop = |record: CorpusRecord, reason: String| Verdict::Drop(Dropped { record, reason });
    let Some(english) = record.english() else {
        return drop(record.clone(), "no English original in meta".into());
    };
    let score = bt
        .translate(&record.src, record.lang, Lang::EN)
        .and_then(|back| Ok((provider.embed(english, Lang::EN)?, provider.embed(&back, Lang::EN)?)))
        .map(|(a, b)| cosine(&a, &b));
    match score {
        Err(e) => drop(record.clone(), format!("adapter: {e}")),
        Ok(q) => {
            let mut r = record.clone();
            r.quality = Some(q);
            if q >= threshold {
                Verdict::Keep(r)
            } else {
                drop(r, format!("quality {q:.4} below {threshold}"))
            }
        }
    }
}
