//! Toolkit for multilingual AMR parsing by noisy knowledge distillation.
//!
//! The crate covers everything around the neural parser itself:
//!
//! * [`graph`] and [`penman`]: the AMR graph model and PENMAN reader/writer.
//! * [`linearize`] and [`repair`]: graph-isomorphic token linearization with
//!   `<Vn>` variable tokens, and structural repair of model output.
//! * [`smatch`]: the Smatch metric (hill climbing plus an exhaustive oracle).
//! * [`kd`]: sequence-model interface, MLE / token-level / sequence-level
//!   distillation objectives, beam search and a trainable count model.
//! * [`pipeline`]: silver-data construction, noise, back-translation
//!   filtering, vocabulary augmentation and corpus statistics.
//! * [`cli`]: the `amrkit` command-line front end.

pub mod cli;
pub mod graph;
pub mod kd;
pub mod linearize;
pub mod penman;
pub mod pipeline;
pub mod repair;
pub mod report;
pub mod smatch;
pub mod synth;
mod util;

pub use graph::{AmrGraph, Edge, GraphBuilder, GraphError, Metadata, Node, NodeKind, Triple, TripleKind};
pub use linearize::{delinearize, linearize, LinearSeq, LinearizeError};
pub use penman::{parse_amr_file, parse_penman, serialize_penman, PenmanError};
pub use repair::{repair, repair_pass_report, RepairReport};
pub use smatch::{corpus_smatch, smatch_exact, smatch_hill_climb, CorpusReport, SmatchError, SmatchResult};
