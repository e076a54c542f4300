//! Distillation objectives over an abstract sequence model.
//!
//! Any parser is a [`SeqModel`]: a next-token distribution conditioned on
//! the output prefix and the input sentence. Teacher and student are both
//! instances. The module provides
//!
//! * [`mle_loss`], [`token_kd_loss`]: teacher-forced objectives;
//! * [`beam_search`], [`exact_mode`], [`exact_seq_kl`]: decoding and the
//!   enumeration oracles that certify it;
//! * [`ToyCondModel`]: a smoothed count model small enough to enumerate;
//! * [`train`]: MLE, token-level, sequence-level and combined training;
//! * [`seq_kd_build`]: teacher-mode targets for a corpus of English inputs.

mod build;
mod loss;
mod model;
mod search;
mod toy;
mod train;

use thiserror::Error;

pub use build::{seq_kd_build, BuildConfig};
pub use loss::{kl_divergence, mle_loss, token_kd_loss};
pub use model::{SeqModel, Vocab, BOS, EOS};
pub use search::{beam_search, enumerate_sequences, exact_mode, exact_seq_kl, BeamHypothesis, ENUMERATION_LIMIT};
pub use toy::{ToyCondModel, ToyConfig, MODEL_FORMAT, MODEL_VERSION};
pub use train::{train, KdBatch, KdRecord, Objective, TrainConfig, TrainStats};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KdError {
    #[error("target token `{token}` has probability 0 at step {step}")]
    ZeroProbability { step: usize, token: String },
    #[error("teacher assigns 0 to `{token}` where the student does not (step {step})")]
    SupportMismatch { step: usize, token: String },
    #[error("target sequence must end with {EOS}")]
    MissingEos,
    #[error("token `{0}` is not in the vocabulary")]
    UnknownToken(String),
    #[error("student and teacher vocabularies differ")]
    VocabMismatch,
    #[error("enumeration would visit {0} sequences (limit {ENUMERATION_LIMIT})")]
    TooLarge(u128),
    #[error("record {record}: objective needs `{field}`")]
    MissingField { record: usize, field: &'static str },
    #[error("objective needs a teacher model")]
    MissingTeacher,
    #[error("model file: {0}")]
    Format(String),
}
