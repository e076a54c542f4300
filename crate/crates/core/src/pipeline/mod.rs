//! Silver-data construction and quality control.
//!
//! Records travel as JSONL ([`CorpusRecord`]). Noise generators produce
//! student inputs, [`bt_filter`] scores translated records by
//! back-translation consistency, [`augment_vocab`] picks frequent relations
//! and frames, and [`CorpusStats`] counts instances per language and split.

mod adapter;
mod filter;
mod noise;
mod record;
mod stats;
mod vocab;

use thiserror::Error;

pub use adapter::{cosine, CommandAdapter, EmbeddingProvider, StubAdapter, Translator, ADAPTER_ENV, EMBED_DIM};
pub use filter::{bt_filter, Dropped, FilterOutcome, DEFAULT_THRESHOLD};
pub use noise::{masked_count, word_delete, NoiseKind, NoiseSpec, MASK};
pub use record::{read_jsonl, write_jsonl, CorpusRecord, Lang, Provenance, Split, META_EN, META_NOISE};
pub use stats::{thousands, CorpusStats};
pub use vocab::{augment_vocab, is_frame, DEFAULT_MIN_COUNT};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdapterError {
    #[error("could not run adapter: {0}")]
    Spawn(String),
    #[error("adapter exited with status {status}: {stderr}")]
    Failed { status: i32, stderr: String },
    #[error("bad adapter reply: {0}")]
    Protocol(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Adapter(#[from] AdapterError),
}
