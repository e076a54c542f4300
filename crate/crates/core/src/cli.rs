//! The `amrkit` command line.
//!
//! Every subcommand is a thin wrapper over library calls. Exit codes: 0 on
//! success, 1 on usage errors, 2 on data errors (unreadable or malformed
//! input, adapter failures that abort a command).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::graph::AmrGraph;
use crate::kd::{seq_kd_build, BuildConfig, SeqModel, ToyCondModel, ToyConfig, Vocab};
use crate::linearize::{delinearize, linearize, LinearSeq};
use crate::penman::{parse_amr_file, write_amr_file};
use crate::pipeline::{
    augment_vocab, bt_filter, read_jsonl, write_jsonl, CommandAdapter, CorpusRecord, CorpusStats, EmbeddingProvider,
    Lang, NoiseKind, NoiseSpec, Provenance, StubAdapter, Translator, DEFAULT_MIN_COUNT, DEFAULT_THRESHOLD, META_EN,
    META_NOISE,
};
use crate::repair::{repair_pass_report, RepairReport};
use crate::report::{render_json, render_table, ScoreRow};
use crate::smatch::{corpus_smatch, CorpusReport, DEFAULT_RESTARTS};
use crate::synth::synthetic_corpus;

#[derive(Debug, Parser)]
#[command(name = "amrkit", version, about = "AMR parsing toolkit: graphs, Smatch, distillation data")]
pub struct Cli {
    /// Seed for randomized subcommands (required by noise, distill, synth).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Report format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a PENMAN file, re-emitting it normalized.
    Parse(InOut),
    /// Write a JSON graph list as PENMAN.
    Serialize(InOut),
    /// One linearization line per graph.
    Linearize(InOut),
    /// Linearization lines (or JSONL records) back to PENMAN.
    Delinearize(InOut),
    /// Repair linearization lines (or the targets of JSONL records).
    Repair(RepairArgs),
    /// Corpus Smatch between predicted and gold PENMAN files.
    Smatch(SmatchArgs),
    /// Build sequence-level distillation records from a toy teacher.
    Distill(DistillArgs),
    /// Noise the sources of a corpus (machine translation or word masking).
    Noise(NoiseArgs),
    /// Back-translation consistency filter.
    Filter(FilterArgs),
    /// Frequent relations and frames of a gold corpus.
    Vocab(VocabArgs),
    /// Instance counts per language and split.
    Stats(StatsArgs),
    /// Per-language score table with AVG_X and AVG.
    Report(ReportArgs),
    /// Fit a toy teacher on a gold JSONL corpus.
    Train(TrainArgs),
    /// Write a synthetic gold corpus (gold.amr, gold.jsonl, en.txt).
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct InOut {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RepairArgs {
    #[command(flatten)]
    pub io: InOut,
    /// Write the per-record repair report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SmatchArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    /// Include per-record scores in the report.
    #[arg(long)]
    pub per_record: bool,
}

#[derive(Debug, Args)]
pub struct DistillArgs {
    #[arg(long)]
    pub teacher: PathBuf,
    /// English sentences, one per line, or JSONL records.
    #[arg(long)]
    pub inputs: PathBuf,
    /// none | mt | mt:LANG | delete:K, optionally @EPOCH to resample
    #[arg(long, default_value = "none")]
    pub noise: String,
    #[arg(long, default_value_t = 5)]
    pub beam: usize,
    #[arg(long, default_value_t = 64)]
    pub max_len: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    /// Sentences, one per line, or JSONL records.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// mt | mt:LANG | delete:K, optionally @EPOCH to resample
    #[arg(long)]
    pub noise: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Write dropped records with reasons as JSONL.
    #[arg(long)]
    pub dropped: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VocabArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MIN_COUNT)]
    pub min_count: usize,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long = "in", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// `DE,ES,IT,ZH,EN` scores, optionally prefixed by `label=`. Repeatable.
    #[arg(long, required_unless_present = "reports")]
    pub scores: Vec<String>,
    /// Five `smatch --format json` reports in DE ES IT ZH EN order.
    #[arg(long, num_args = 5, conflicts_with = "scores")]
    pub reports: Vec<PathBuf>,
    #[arg(long, default_value = "model")]
    pub label: String,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub epochs: usize,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
}

type CliResult = Result<(), CliError>;

fn data<E: std::fmt::Display>(context: impl std::fmt::Display) -> impl FnOnce(E) -> CliError {
    move |e| CliError::Data(format!("{context}: {e}"))
}

/// Runs the CLI on `args` (including the program name), writing reports to
/// stdout and diagnostics to stderr. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    // unlocked handles: worker threads log to stderr while the command runs
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            let _ = writeln!(err, "error: --jobs must be at least 1");
            return 1;
        }
        pool = pool.num_threads(j);
    }
    // reports are small; buffer them so the work can run inside the pool
    let result = match pool.build() {
        Ok(pool) => {
            let (result, buf) = pool.install(|| {
                let mut buf = Vec::new();
                (dispatch(&cli, &mut buf), buf)
            });
            let _ = out.write_all(&buf);
            result
        }
        Err(e) => Err(CliError::Data(format!("thread pool: {e}"))),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(CliError::Data(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult {
    match &cli.command {
        Command::Parse(a) => cmd_parse(cli, a, out),
        Command::Serialize(a) => cmd_serialize(a, out),
        Command::Linearize(a) => cmd_linearize(a, out),
        Command::Delinearize(a) => cmd_delinearize(a, out),
        Command::Repair(a) => cmd_repair(cli, a, out),
        Command::Smatch(a) => cmd_smatch(cli, a, out),
        Command::Distill(a) => cmd_distill(cli, a, out),
        Command::Noise(a) => cmd_noise(cli, a, out),
        Command::Filter(a) => cmd_filter(cli, a, out),
        Command::Vocab(a) => cmd_vocab(cli, a, out),
        Command::Stats(a) => cmd_stats(cli, a, out),
        Command::Report(a) => cmd_report(cli, a, out),
        Command::Train(a) => cmd_train(a, out),
        Command::Synth(a) => cmd_synth(cli, a, out),
    }
}

fn require_seed(cli: &Cli, what: &str) -> Result<u64, CliError> {
    cli.seed.ok_or_else(|| CliError::Usage(format!("`{what}` is randomized and requires --seed")))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(data(path.display()))
}

fn write_file(path: &Path, content: &str) -> CliResult {
    fs::write(path, content).map_err(data(path.display()))
}

fn emit(path: Option<&Path>, content: &str, out: &mut dyn Write) -> CliResult {
    match path {
        Some(p) => write_file(p, content),
        None => out.write_all(content.as_bytes()).map_err(data("stdout")),
    }
}

fn say(out: &mut dyn Write, text: impl std::fmt::Display) -> CliResult {
    writeln!(out, "{text}").map_err(data("stdout"))
}

fn is_jsonl(text: &str) -> bool {
    text.lines().find(|l| !l.trim().is_empty()).is_some_and(|l| l.trim_start().starts_with('{'))
}

fn read_graphs(path: &Path) -> Result<Vec<AmrGraph>, CliError> {
    parse_amr_file(&read(path)?).map_err(|(i, e)| CliError::Data(format!("{}: graph {}: {e}", path.display(), i + 1)))
}

fn read_records(path: &Path) -> Result<Vec<CorpusRecord>, CliError> {
    read_jsonl(&read(path)?).map_err(data(path.display()))
}

/// `(id, english)` pairs from a sentence file or the EN records of a JSONL
/// corpus. Plain lines get ids `s000000`, `s000001`, ...
fn read_sentences(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = read(path)?;
    if is_jsonl(&text) {
        let recs = read_jsonl(&text).map_err(data(path.display()))?;
        return Ok(recs.into_iter().filter(|r| r.lang == Lang::EN).map(|r| (r.id, r.src)).collect());
    }
    Ok(text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| (format!("s{i:06}"), l.trim().to_string()))
        .collect())
}

enum Adapter {
    Stub(StubAdapter),
    Command(CommandAdapter),
}

impl Adapter {
    /// `AMRKIT_ADAPTER_CMD` if set, the stub otherwise.
    fn select(seed: u64) -> Self {
        match CommandAdapter::from_env() {
            Some(c) => Adapter::Command(c),
            None => Adapter::Stub(StubAdapter::new(seed)),
        }
    }

    fn translator(&self) -> &dyn Translator {
        match self {
            Adapter::Stub(s) => s,
            Adapter::Command(c) => c,
        }
    }

    fn embedder(&self) -> &dyn EmbeddingProvider {
        match self {
            Adapter::Stub(s) => s,
            Adapter::Command(c) => c,
        }
    }
}

fn cmd_parse(cli: &Cli, a: &InOut, out: &mut dyn Write) -> CliResult {
    let graphs = read_graphs(&a.input)?;
    let text = match cli.format {
        Format::Table => write_amr_file(&graphs),
        Format::Json => serde_json::to_string_pretty(&graphs).expect("graphs serialize") + "\n",
    };
    emit(a.out.as_deref(), &text, out)
}

fn cmd_serialize(a: &InOut, out: &mut dyn Write) -> CliResult {
    let graphs: Vec<AmrGraph> = serde_json::from_str(&read(&a.input)?).map_err(data(a.input.display()))?;
    emit(a.out.as_deref(), &write_amr_file(&graphs), out)
}

fn cmd_linearize(a: &InOut, out: &mut dyn Write) -> CliResult {
    let graphs = read_graphs(&a.input)?;
    let text: String = graphs.iter().map(|g| linearize(g).to_string() + "\n").collect();
    emit(a.out.as_deref(), &text, out)
}

fn cmd_delinearize(a: &InOut, out: &mut dyn Write) -> CliResult {
    let text = read(&a.input)?;
    let items: Vec<(Option<String>, LinearSeq)> = if is_jsonl(&text) {
        read_jsonl(&text)
            .map_err(data(a.input.display()))?
            .into_iter()
            .map(|r| match r.tgt {
                Some(t) => Ok((Some(r.id), t)),
                None => Err(CliError::Data(format!("record {} has no target", r.id))),
            })
            .collect::<Result<_, _>>()?
    } else {
        text.lines().filter(|l| !l.trim().is_empty()).map(|l| (None, LinearSeq::from_line(l))).collect()
    };
    let mut graphs = Vec::with_capacity(items.len());
    for (i, (id, seq)) in items.into_iter().enumerate() {
        let g = delinearize(&seq).map_err(|e| CliError::Data(format!("{}: item {}: {e}", a.input.display(), i + 1)))?;
        graphs.push(match id {
            Some(id) => {
                let mut meta = g.metadata().clone();
                meta.push("id", &id);
                g.with_metadata(meta)
            }
            None => g,
        });
    }
    emit(a.out.as_deref(), &write_amr_file(&graphs), out)
}

fn cmd_repair(cli: &Cli, a: &RepairArgs, out: &mut dyn Write) -> CliResult {
    let text = read(&a.io.input)?;
    let mut total = RepairReport::default();
    let mut per_record = Vec::new();
    let output = if is_jsonl(&text) {
        let mut recs = read_jsonl(&text).map_err(data(a.io.input.display()))?;
        for r in &mut recs {
            if let Some(t) = &r.tgt {
                let (fixed, rep) = repair_pass_report(t.tokens());
                total.merge(&rep);
                per_record.push(json!({"id": r.id, "report": rep}));
                r.tgt = Some(fixed);
            }
        }
        write_jsonl(&recs)
    } else {
        let mut lines = String::new();
        for (i, line) in text.lines().enumerate() {
            let (fixed, rep) = repair_pass_report(LinearSeq::from_line(line).tokens());
            total.merge(&rep);
            per_record.push(json!({"line": i + 1, "report": rep}));
            lines.push_str(&fixed.to_string());
            lines.push('\n');
        }
        lines
    };
    emit(a.io.out.as_deref(), &output, out)?;
    let changed = per_record.iter().filter(|r| r["report"] != json!(RepairReport::default())).count();
    if let Some(p) = &a.report {
        let report = json!({"records": per_record.len(), "changed": changed, "total": total, "per_record": per_record});
        write_file(p, &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
    }
    if a.io.out.is_some() {
        match cli.format {
            Format::Json => say(out, json!({"records": per_record.len(), "changed": changed, "total": total}))?,
            Format::Table => say(out, format!("repaired {changed} of {} records", per_record.len()))?,
        }
    }
    Ok(())
}

fn cmd_smatch(cli: &Cli, a: &SmatchArgs, out: &mut dyn Write) -> CliResult {
    let seed = cli.seed.unwrap_or(0);
    let pred = read_graphs(&a.pred)?;
    let gold = read_graphs(&a.gold)?;
    let mut report = corpus_smatch(&pred, &gold, a.restarts, seed).map_err(|e| CliError::Data(e.to_string()))?;
    if !a.per_record {
        report.records.clear();
    }
    match cli.format {
        Format::Json => {
            let mut v = serde_json::to_value(&report).expect("report serializes");
            v["seed"] = json!(seed);
            v["restarts"] = json!(a.restarts);
            say(out, serde_json::to_string_pretty(&v).expect("json"))
        }
        Format::Table => say(out, smatch_table(&report, seed, a.restarts)),
    }
}

fn smatch_table(r: &CorpusReport, seed: u64, restarts: usize) -> String {
    let mut s = format!("# smatch seed={seed} restarts={restarts} records={}\n", r.n_records);
    s += &format!("Precision: {:.4}\nRecall:    {:.4}\nF1:        {:.4}", r.precision, r.recall, r.f1);
    for (i, rec) in r.records.iter().enumerate() {
        s += &format!("\n{:>6}  P {:.4}  R {:.4}  F1 {:.4}", i + 1, rec.precision, rec.recall, rec.f1);
    }
    s
}

fn cmd_distill(cli: &Cli, a: &DistillArgs, out: &mut dyn Write) -> CliResult {
    let seed = require_seed(cli, "distill")?;
    if a.beam == 0 || a.max_len == 0 {
        return Err(CliError::Usage("--beam and --max-len must be positive".into()));
    }
    let noise = NoiseSpec::parse(&a.noise, seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let teacher = ToyCondModel::from_json(&read(&a.teacher)?).map_err(data(a.teacher.display()))?;
    let inputs = read_sentences(&a.inputs)?;
    let adapter = Adapter::select(seed);
    let config = BuildConfig { beam_size: a.beam, max_len: a.max_len };
    let records = seq_kd_build(&teacher, &inputs, &noise, adapter.translator(), &config);
    write_file(&a.out, &write_jsonl(&records))?;
    let skipped = inputs.len() - records.len();
    match cli.format {
        Format::Json => say(out, json!({"seed": seed, "noise": noise.to_string(), "records": records.len(), "skipped": skipped})),
        Format::Table => say(out, format!("# distill seed={seed} noise={noise} beam={}\nrecords: {}\nskipped: {skipped}", a.beam, records.len())),
    }
}

fn cmd_noise(cli: &Cli, a: &NoiseArgs, out: &mut dyn Write) -> CliResult {
    let seed = require_seed(cli, "noise")?;
    let noise = NoiseSpec::parse(&a.noise, seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let text = read(&a.input)?;
    let records: Vec<CorpusRecord> = if is_jsonl(&text) {
        read_jsonl(&text).map_err(data(a.input.display()))?
    } else {
        read_sentences(&a.input)?
            .into_iter()
            .map(|(id, s)| CorpusRecord {
                id,
                lang: Lang::EN,
                split: Default::default(),
                src: s,
                tgt: None,
                provenance: Provenance::SilverMt,
                quality: None,
                meta: Default::default(),
            })
            .collect()
    };
    let adapter = Adapter::select(seed);
    let mut outputs = Vec::new();
    let mut skipped = 0;
    for (i, r) in records.into_iter().enumerate() {
        if r.lang != Lang::EN {
            outputs.push(r);
            continue;
        }
        match noise.apply(&r.src, i, adapter.translator()) {
            Ok((src, lang)) => {
                let mut n = r.clone();
                n.meta.insert(META_EN.to_string(), r.src.clone());
                n.meta.insert(META_NOISE.to_string(), noise.to_string());
                n.src = src;
                n.lang = lang;
                if noise.kind == NoiseKind::MtAdapter {
                    n.provenance = Provenance::SilverMt;
                }
                outputs.push(n);
            }
            Err(e) => {
                log::warn!("skipping {}: {e}", r.id);
                skipped += 1;
            }
        }
    }
    write_file(&a.out, &write_jsonl(&outputs))?;
    match cli.format {
        Format::Json => say(out, json!({"seed": seed, "noise": noise.to_string(), "records": outputs.len(), "skipped": skipped})),
        Format::Table => say(out, format!("# noise seed={seed} noise={noise}\nrecords: {}\nskipped: {skipped}", outputs.len())),
    }
}

fn cmd_filter(cli: &Cli, a: &FilterArgs, out: &mut dyn Write) -> CliResult {
    if !(-1.0..=1.0).contains(&a.threshold) {
        return Err(CliError::Usage(format!("threshold {} outside [-1, 1]", a.threshold)));
    }
    let records = read_records(&a.input)?;
    let adapter = Adapter::select(cli.seed.unwrap_or(0));
    let outcome = bt_filter(&records, adapter.embedder(), adapter.translator(), a.threshold);
    write_file(&a.out, &write_jsonl(&outcome.kept))?;
    if let Some(p) = &a.dropped {
        let lines: String = outcome.dropped.iter().map(|d| serde_json::to_string(d).expect("json") + "\n").collect();
        write_file(p, &lines)?;
    }
    match cli.format {
        Format::Json => say(out, json!({"threshold": a.threshold, "kept": outcome.kept.len(), "dropped": outcome.dropped.len()})),
        Format::Table => say(out, format!("# filter threshold={}\nkept:    {}\ndropped: {}", a.threshold, outcome.kept.len(), outcome.dropped.len())),
    }
}

fn cmd_vocab(cli: &Cli, a: &VocabArgs, out: &mut dyn Write) -> CliResult {
    let records = read_records(&a.input)?;
    let gold: Vec<CorpusRecord> = records.into_iter().filter(|r| r.provenance == Provenance::Gold).collect();
    let items = augment_vocab(&gold, a.min_count);
    match cli.format {
        Format::Json => say(out, json!(items)),
        Format::Table => items.iter().try_for_each(|t| say(out, t)),
    }
}

fn cmd_stats(cli: &Cli, a: &StatsArgs, out: &mut dyn Write) -> CliResult {
    let mut records = Vec::new();
    for p in &a.inputs {
        records.extend(read_records(p)?);
    }
    let stats = CorpusStats::from_records(&records);
    match cli.format {
        Format::Json => say(out, serde_json::to_string_pretty(&stats.to_json()).expect("json")),
        Format::Table => out.write_all(stats.render_table().as_bytes()).map_err(data("stdout")),
    }
}

fn parse_scores(spec: &str, default_label: &str) -> Result<ScoreRow, CliError> {
    let (label, values) = match spec.split_once('=') {
        Some((l, v)) => (l.to_string(), v),
        None => (default_label.to_string(), spec),
    };
    let nums: Vec<f64> = values
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("bad score list `{spec}`: {e}")))?;
    let scores: [f64; 5] = nums
        .try_into()
        .map_err(|_| CliError::Usage(format!("`{spec}` needs five scores (DE,ES,IT,ZH,EN)")))?;
    Ok(ScoreRow::new(label, scores))
}

fn cmd_report(cli: &Cli, a: &ReportArgs, out: &mut dyn Write) -> CliResult {
    let rows: Vec<ScoreRow> = if a.reports.is_empty() {
        a.scores.iter().map(|s| parse_scores(s, &a.label)).collect::<Result<_, _>>()?
    } else {
        let mut scores = [0.0; 5];
        for (slot, p) in scores.iter_mut().zip(&a.reports) {
            let r: CorpusReport = serde_json::from_str(&read(p)?).map_err(data(p.display()))?;
            *slot = r.f1 * 100.0;
        }
        vec![ScoreRow::new(a.label.clone(), scores)]
    };
    match cli.format {
        Format::Json => say(out, serde_json::to_string_pretty(&render_json(&rows)).expect("json")),
        Format::Table => out.write_all(render_table(&rows).as_bytes()).map_err(data("stdout")),
    }
}

/// Vocabulary of a gold corpus: target tokens in order of first use.
pub fn corpus_vocab(records: &[CorpusRecord]) -> Vocab {
    Vocab::new(records.iter().filter_map(|r| r.tgt.as_ref()).flat_map(|t| t.tokens().iter().cloned()))
}

/// Teacher-forced counts of every `src -> tgt` pair, `epochs` times.
pub fn fit_toy_teacher(records: &[CorpusRecord], config: ToyConfig, epochs: usize) -> Result<ToyCondModel, crate::kd::KdError> {
    let vocab = corpus_vocab(records);
    let mut model = ToyCondModel::new(vocab.clone(), config)?;
    for _ in 0..epochs {
        for r in records {
            if let Some(t) = &r.tgt {
                let mut y = vocab.encode(t.tokens())?;
                y.push(vocab.eos());
                let x: Vec<String> = r.src.split_whitespace().map(String::from).collect();
                model.observe_sequence(&x, &y, 1.0);
            }
        }
    }
    Ok(model)
}

fn cmd_train(a: &TrainArgs, out: &mut dyn Write) -> CliResult {
    let records = read_records(&a.corpus)?;
    let config = ToyConfig { order: a.order, alpha: a.alpha, ..Default::default() };
    let model = fit_toy_teacher(&records, config, a.epochs).map_err(|e| CliError::Usage(e.to_string()))?;
    write_file(&a.out, &model.to_json())?;
    say(out, format!("trained on {} records: {} tokens, {} rows", records.len(), model.vocab().len(), model.rows()))
}

fn cmd_synth(cli: &Cli, a: &SynthArgs, out: &mut dyn Write) -> CliResult {
    let seed = require_seed(cli, "synth")?;
    let corpus = synthetic_corpus(&mut ChaCha8Rng::seed_from_u64(seed), a.n);
    fs::create_dir_all(&a.out_dir).map_err(data(a.out_dir.display()))?;
    let graphs: Vec<AmrGraph> = corpus.iter().map(|e| e.graph.clone()).collect();
    let records: Vec<CorpusRecord> = corpus.iter().map(|e| CorpusRecord::gold(&e.id, &e.sentence, linearize(&e.graph))).collect();
    let sentences: String = corpus.iter().map(|e| e.sentence.clone() + "\n").collect();
    write_file(&a.out_dir.join("gold.amr"), &write_amr_file(&graphs))?;
    write_file(&a.out_dir.join("gold.jsonl"), &write_jsonl(&records))?;
    write_file(&a.out_dir.join("en.txt"), &sentences)?;
    say(out, format!("# synth seed={seed}\nwrote {} examples to {}", a.n, a.out_dir.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("amrkit").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn help_and_usage_codes() {
        assert_eq!(run_capture(&["--help"]).0, 0);
        let (code, _, err) = run_capture(&["frobnicate"]);
        assert_eq!(code, 1);
        assert!(err.contains("frobnicate"));
        assert_eq!(run_capture(&["smatch", "--pred", "x.amr"]).0, 1);
    }

    #[test]
    fn report_headline_row() {
        let (code, out, _) = run_capture(&["report", "--scores", "73.1,75.9,75.4,61.9,83.9"]);
        assert_eq!(code, 0);
        assert!(out.contains("  71.6   74.0"), "{out}");
        let (code, out, _) = run_capture(&["--format", "json", "report", "--scores", "tok=72.1,75.0,74.9,60.8,83.5"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["rows"][0]["label"], "tok");
        assert_eq!(run_capture(&["report", "--scores", "1,2,3"]).0, 1);
    }

    #[test]
    fn missing_file_is_data_error() {
        assert_eq!(run_capture(&["parse", "--in", "/nonexistent/x.amr"]).0, 2);
    }

    #[test]
    fn randomized_commands_need_seed() {
        let (code, _, err) = run_capture(&["synth", "--out-dir", "/tmp/never"]);
        assert_eq!(code, 1);
        assert!(err.contains("--seed"));
    }
}
