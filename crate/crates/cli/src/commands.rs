//! Subcommand bodies. Each reads its inputs, calls into the library and
//! hands records back to [`Io`] for output.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use layman_eval::datapipe::{
    build_dataset, deduplicate, load_corpus, refine_batch, sample_export, translate_batch, BuildConfig, BuildPaths,
    ChatError, ChatProvider, PipelineError, RefineOptions, RunStats,
};
use layman_eval::embedkit::{EmbedError, EmbeddingCache, EmbeddingProvider};
use layman_eval::jsonl::{load_jsonl, to_jsonl_bytes, write_atomic, JsonlError};
use layman_eval::readability::{readability_suite, text_stats, ReadabilityReport};
use layman_eval::semeval::{evaluate_corpus, EvalConfig, LaymanIndex, ReportRecord, SemevalError};
use layman_eval::statkit::{cohens_kappa, diversity, similarity_histogram, uniform_bins, PairedSeries, StatError};
use layman_eval::textcore::{segment_report, SentenceRecord};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::{CliError, Command, GlobalArgs};

pub(crate) struct Io<'a> {
    pub global: &'a GlobalArgs,
    pub cwd: &'a Path,
    pub stdout: &'a mut (dyn Write + Send),
    pub stderr: &'a mut (dyn Write + Send),
}

impl Io<'_> {
    fn path(&self, p: &Path) -> PathBuf {
        if p.is_relative() {
            self.cwd.join(p)
        } else {
            p.to_path_buf()
        }
    }

    fn output_path(&self) -> Option<PathBuf> {
        self.global.output.as_deref().map(|p| self.path(p))
    }

    /// Writes data to --output (atomically) or stdout.
    fn emit(&mut self, bytes: &[u8]) -> Result<(), CliError> {
        match self.output_path() {
            Some(p) => write_atomic(&p, bytes).map_err(|e| runtime(format!("{}: {e}", p.display()))),
            None => self.stdout.write_all(bytes).map_err(|e| runtime(e.to_string())),
        }
    }

    fn emit_records<T: Serialize>(&mut self, records: &[T]) -> Result<(), CliError> {
        self.emit(&to_jsonl_bytes(records))
    }

    fn emit_json<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        let mut line = serde_json::to_vec(value).expect("value serializes");
        line.push(b'\n');
        self.emit(&line)
    }

    /// One-line JSON summary to --summary or stderr.
    fn summary(&mut self, value: Value) -> Result<(), CliError> {
        let mut line = serde_json::to_vec(&value).expect("value serializes");
        line.push(b'\n');
        match &self.global.summary {
            Some(p) => {
                let p = self.path(p);
                write_atomic(&p, &line).map_err(|e| runtime(format!("{}: {e}", p.display())))
            }
            None => self.stderr.write_all(&line).map_err(|e| runtime(e.to_string())),
        }
    }

    fn load<T: serde::de::DeserializeOwned>(&self, p: &Path) -> Result<Vec<T>, CliError> {
        load_jsonl(self.path(p)).map_err(data_error)
    }
}

fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

fn runtime(m: impl Into<String>) -> CliError {
    CliError::Runtime(m.into())
}

fn data_error(e: JsonlError) -> CliError {
    usage(e.to_string())
}

fn embed_error(e: EmbedError) -> CliError {
    match e {
        EmbedError::Config(_) | EmbedError::UnknownText(_) | EmbedError::DegenerateVector => usage(e.to_string()),
        _ => runtime(e.to_string()),
    }
}

fn pipeline_error(e: PipelineError) -> CliError {
    match &e {
        PipelineError::Precondition(_) | PipelineError::Data(_) | PipelineError::CheckpointMismatch(_) => {
            usage(e.to_string())
        }
        PipelineError::Chat(ChatError::Config(_)) | PipelineError::Embed(EmbedError::Config(_)) => usage(e.to_string()),
        _ => runtime(e.to_string()),
    }
}

fn semeval_error(e: SemevalError) -> CliError {
    match e {
        SemevalError::Embed(inner) => embed_error(inner),
        other => usage(other.to_string()),
    }
}

fn stat_error(e: StatError) -> CliError {
    match e {
        StatError::Embed(inner) => embed_error(inner),
        other => usage(other.to_string()),
    }
}

struct Providers {
    embedder: Arc<dyn EmbeddingProvider>,
    cache: EmbeddingCache,
}

fn embedding(cfg: &RunConfig) -> Result<Providers, CliError> {
    let embedder = cfg.embedding.build().map_err(embed_error)?;
    let cache = match &cfg.cache {
        Some(p) => EmbeddingCache::open(p).map_err(|e| runtime(format!("cache {}: {e}", p.display())))?,
        None => EmbeddingCache::in_memory(),
    };
    Ok(Providers { embedder, cache })
}

fn chat(cfg: &RunConfig) -> Result<Arc<dyn ChatProvider>, CliError> {
    cfg.chat.build().map_err(|e| match e {
        ChatError::Config(_) => usage(e.to_string()),
        other => runtime(other.to_string()),
    })
}

fn refine_options(cfg: &RunConfig, retranslate: bool) -> RefineOptions {
    RefineOptions {
        threshold: cfg.theta,
        max_iterations: cfg.max_iterations,
        retranslate,
        batch_size: cfg.batch_size,
    }
}

fn items(records: &[SentenceRecord]) -> Vec<(String, String)> {
    records.iter().map(|r| (r.id.clone(), r.text.clone())).collect()
}

pub(crate) fn dispatch(command: &Command, cfg: &RunConfig, io: &mut Io<'_>) -> Result<(), CliError> {
    match command {
        Command::Dedup { input, split } => dedup(cfg, io, input, *split),
        Command::Translate { input } => translate(cfg, io, input),
        Command::Refine { input, retranslate } => refine(cfg, io, input, *retranslate),
        Command::BuildDataset {
            input,
            level,
            resume,
            retranslate,
        } => build(cfg, io, input, (*level).into(), *resume, *retranslate),
        Command::Evaluate {
            candidates,
            references,
            dataset,
            no_substitute,
            metrics,
            best_match,
            floor,
            similarities_out,
        } => evaluate(
            cfg,
            io,
            EvaluateArgs {
                candidates,
                references,
                dataset: dataset.as_deref(),
                substitute: !no_substitute,
                metrics,
                best_match: *best_match,
                floor: *floor,
                similarities_out: similarities_out.as_deref(),
            },
        ),
        Command::Readability { input, text, round } => readability(io, input.as_deref(), text.as_deref(), *round),
        Command::Correlate { metric, human } => correlate(io, metric, human),
        Command::Kappa { a, b, bins } => kappa(io, a, b, *bins),
        Command::Hist {
            input,
            bins,
            range,
            csv,
            bars,
        } => hist(io, input, *bins, range, csv.as_deref(), *bars),
        Command::Diversity { input } => diversity_cmd(cfg, io, input),
        Command::SampleExport { input, count } => sample(cfg, io, input, *count),
    }
}

fn dedup(cfg: &RunConfig, io: &mut Io<'_>, input: &Path, split: bool) -> Result<(), CliError> {
    let mut records: Vec<SentenceRecord> = io.load(input)?;
    if split {
        records = records.iter().flat_map(|r| segment_report(&r.id, &r.text)).collect();
    }
    let p = embedding(cfg)?;
    let result = deduplicate(&records, cfg.dedup_threshold, p.embedder.as_ref(), &p.cache).map_err(pipeline_error)?;
    log::info!("kept {} of {} sentences", result.kept.len(), records.len());
    io.emit_records(&result.kept)?;
    io.summary(json!({
        "command": "dedup",
        "input": records.len(),
        "kept": result.kept.len(),
        "dropped": result.dropped,
        "degenerate": result.degenerate,
        "comparisons": result.comparisons,
    }))
}

#[derive(Serialize)]
struct Translation<'a> {
    id: &'a str,
    professional: &'a str,
    layman: String,
}

fn translate(cfg: &RunConfig, io: &mut Io<'_>, input: &Path) -> Result<(), CliError> {
    let records: Vec<SentenceRecord> = io.load(input)?;
    let chat = chat(cfg)?;
    let texts: Vec<&str> = records.iter().map(|r| r.text.as_str()).collect();
    let out = translate_batch(&texts, chat.as_ref(), cfg.batch_size).map_err(pipeline_error)?;
    let rows: Vec<Translation> = records
        .iter()
        .zip(out)
        .map(|(r, layman)| Translation {
            id: &r.id,
            professional: &r.text,
            layman,
        })
        .collect();
    io.emit_records(&rows)?;
    io.summary(json!({"command": "translate", "count": rows.len()}))
}

fn refine(cfg: &RunConfig, io: &mut Io<'_>, input: &Path, retranslate: bool) -> Result<(), CliError> {
    let records: Vec<SentenceRecord> = io.load(input)?;
    let chat = chat(cfg)?;
    let p = embedding(cfg)?;
    let outcome = refine_batch(
        &items(&records),
        &refine_options(cfg, retranslate),
        chat.as_ref(),
        p.embedder.as_ref(),
        &p.cache,
    )
    .map_err(pipeline_error)?;
    let mut stats = RunStats {
        items: records.len(),
        ..Default::default()
    };
    stats.record(&outcome.pairs, &outcome.rounds);
    io.emit_records(&outcome.pairs)?;
    io.summary(with_command("refine", &stats))
}

fn with_command<T: Serialize>(command: &str, value: &T) -> Value {
    let mut map = Map::new();
    map.insert("command".into(), Value::from(command));
    if let Value::Object(fields) = serde_json::to_value(value).expect("value serializes") {
        map.extend(fields);
    }
    Value::Object(map)
}

fn build(
    cfg: &RunConfig,
    io: &mut Io<'_>,
    input: &Path,
    level: layman_eval::datapipe::Level,
    resume: bool,
    retranslate: bool,
) -> Result<(), CliError> {
    let output = io.output_path().ok_or_else(|| usage("build-dataset requires --output"))?;
    let corpus = load_corpus(io.path(input)).map_err(pipeline_error)?;
    let chat = chat(cfg)?;
    let p = embedding(cfg)?;
    let config = BuildConfig {
        level,
        refine: refine_options(cfg, retranslate),
        dedup_threshold: cfg.dedup_threshold,
        seed: cfg.seed,
    };
    let stats = build_dataset(
        &corpus,
        &config,
        chat.as_ref(),
        p.embedder.as_ref(),
        &p.cache,
        &BuildPaths::for_output(&output),
        resume,
    )
    .map_err(pipeline_error)?;
    io.summary(with_command("build-dataset", &stats))
}

struct EvaluateArgs<'a> {
    candidates: &'a Path,
    references: &'a Path,
    dataset: Option<&'a Path>,
    substitute: bool,
    metrics: &'a str,
    best_match: bool,
    floor: Option<f64>,
    similarities_out: Option<&'a Path>,
}

const LEXICAL_FIELDS: &[(&str, &[&str])] = &[
    ("bleu", &["bleu1", "bleu2", "bleu3", "bleu4"]),
    ("rouge", &["rouge1", "rouge2", "rougeL"]),
    ("meteor", &["meteor"]),
    ("semantic", &["semantic_precision", "semantic_recall", "semantic_f1", "matched_pairs", "best_similarities"]),
];

/// Drops score fields of metric families not asked for.
fn select_metrics(value: &mut Value, wanted: &[&str]) {
    let Value::Object(map) = value else { return };
    for (family, fields) in LEXICAL_FIELDS {
        if !wanted.contains(family) {
            for f in *fields {
                map.remove(*f);
            }
        }
    }
}

#[derive(Serialize)]
struct SimilarityRow<'a> {
    id: &'a str,
    sentence: usize,
    score: f64,
    matched: bool,
}

fn evaluate(cfg: &RunConfig, io: &mut Io<'_>, args: EvaluateArgs<'_>) -> Result<(), CliError> {
    let wanted: Vec<&str> = args.metrics.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if let Some(bad) = wanted.iter().find(|m| !LEXICAL_FIELDS.iter().any(|(f, _)| f == *m)) {
        return Err(usage(format!("unknown metric {bad:?}; expected bleu, rouge, meteor or semantic")));
    }
    if args.substitute && args.dataset.is_none() {
        return Err(usage("substitution needs --dataset (or pass --no-substitute)"));
    }
    let candidates: Vec<ReportRecord> = io.load(args.candidates)?;
    let references: Vec<ReportRecord> = io.load(args.references)?;
    let p = embedding(cfg)?;
    let index = match (args.substitute, args.dataset) {
        (true, Some(d)) => {
            Some(LaymanIndex::load(&io.path(d), p.embedder.as_ref(), &p.cache).map_err(semeval_error)?)
        }
        _ => None,
    };
    let config = EvalConfig {
        theta: cfg.theta,
        substitution: args.substitute,
        substitution_floor: args.floor,
        best_match: args.best_match,
    };
    let report = evaluate_corpus(&candidates, &references, index.as_ref(), &config, p.embedder.as_ref(), &p.cache)
        .map_err(semeval_error)?;

    let mut bytes = Vec::new();
    for r in &report.reports {
        let mut v = serde_json::to_value(r).expect("report serializes");
        select_metrics(&mut v, &wanted);
        serde_json::to_writer(&mut bytes, &v).expect("report serializes");
        bytes.push(b'\n');
    }
    let mut aggregate = serde_json::to_value(&report.aggregate).expect("aggregate serializes");
    select_metrics(&mut aggregate, &wanted);
    serde_json::to_writer(&mut bytes, &json!({ "aggregate": aggregate })).expect("aggregate serializes");
    bytes.push(b'\n');
    io.emit(&bytes)?;

    if let Some(path) = args.similarities_out {
        let mut rows = Vec::new();
        for r in &report.reports {
            let id = r.id.as_deref().unwrap_or("");
            for (i, &score) in r.best_similarities.iter().enumerate() {
                rows.push(SimilarityRow {
                    id,
                    sentence: i,
                    score,
                    matched: score >= cfg.theta,
                });
            }
        }
        let path = io.path(path);
        write_atomic(&path, &to_jsonl_bytes(&rows)).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    }
    io.summary(json!({
        "command": "evaluate",
        "count": report.aggregate.count,
        "substitution": args.substitute,
        "semantic_f1": report.aggregate.semantic_f1,
    }))
}

#[derive(Serialize)]
struct ReadabilityRow<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    id: Option<&'a str>,
    #[serde(flatten)]
    scores: ReadabilityReport<f64>,
}

fn score_text(text: &str, round: bool) -> Result<ReadabilityReport<f64>, CliError> {
    let r = readability_suite::<f64>(&text_stats(text)).map_err(|e| usage(e.to_string()))?;
    Ok(if round { r.rounded() } else { r })
}

fn readability(io: &mut Io<'_>, input: Option<&Path>, text: Option<&str>, round: bool) -> Result<(), CliError> {
    if let Some(text) = text {
        let row = ReadabilityRow {
            id: None,
            scores: score_text(text, round)?,
        };
        return io.emit_json(&row);
    }
    let input = input.ok_or_else(|| usage("readability needs --input or --text"))?;
    let records: Vec<ReportRecord> = io.load(input)?;
    let mut rows = Vec::with_capacity(records.len());
    for r in &records {
        let scores = score_text(&r.text, false).map_err(|e| usage(format!("record {}: {}", r.id, e.message())))?;
        rows.push(ReadabilityRow { id: Some(&r.id), scores });
    }
    let raw: Vec<ReadabilityReport<f64>> = rows.iter().map(|r| r.scores).collect();
    let mean = ReadabilityReport::mean(&raw);
    if round {
        for r in &mut rows {
            r.scores = r.scores.rounded();
        }
    }
    io.emit_records(&rows)?;
    let mean = mean.map(|m| if round { m.rounded() } else { m });
    io.summary(json!({"command": "readability", "count": rows.len(), "mean": mean}))
}

/// Reads `{id, <field>}` lines into an id-to-number map, keeping file order.
fn load_scores(io: &Io<'_>, path: &Path, field: &str) -> Result<Vec<(String, f64)>, CliError> {
    let rows: Vec<Map<String, Value>> = io.load(path)?;
    rows.into_iter()
        .enumerate()
        .map(|(i, row)| {
            let id = match row.get("id") {
                Some(Value::String(s)) => s.clone(),
                Some(v @ Value::Number(_)) => v.to_string(),
                _ => (i + 1).to_string(),
            };
            let score = row
                .get(field)
                .and_then(Value::as_f64)
                .ok_or_else(|| usage(format!("{}: line {}: missing numeric field {field:?}", path.display(), i + 1)))?;
            Ok((id, score))
        })
        .collect()
}

type Joined = (Vec<String>, Vec<f64>, Vec<f64>);

/// Pairs two id-keyed series, in the order of the first.
fn join(a: &[(String, f64)], b: &[(String, f64)]) -> Result<Joined, CliError> {
    let lookup: HashMap<&str, f64> = b.iter().map(|(id, v)| (id.as_str(), *v)).collect();
    if lookup.len() != b.len() {
        return Err(usage("duplicate ids in second file"));
    }
    let mut ids = Vec::new();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (id, v) in a {
        match lookup.get(id.as_str()) {
            Some(w) => {
                ids.push(id.clone());
                x.push(*v);
                y.push(*w);
            }
            None => return Err(usage(format!("id {id} has no counterpart"))),
        }
    }
    if ids.len() != b.len() {
        return Err(usage("files cover different ids"));
    }
    Ok((ids, x, y))
}

fn correlate(io: &mut Io<'_>, metric: &Path, human: &Path) -> Result<(), CliError> {
    let m = load_scores(io, metric, "score")?;
    let h = load_scores(io, human, "score")?;
    let (ids, x, y) = join(&m, &h)?;
    let series = PairedSeries::new(ids, x, y).map_err(stat_error)?;
    let out = json!({
        "n": series.x.len(),
        "pearson": series.pearson().map_err(stat_error)?,
        "spearman": series.spearman().map_err(stat_error)?,
    });
    io.emit_json(&out)?;
    io.summary(json!({"command": "correlate", "n": series.x.len()}))
}

/// Category labels for one annotator: string/integer `label` fields are used
/// as-is, numeric `score` fields are binned uniformly over [0, 1].
fn load_labels(io: &Io<'_>, path: &Path, bins: usize) -> Result<Vec<(String, String)>, CliError> {
    let rows: Vec<Map<String, Value>> = io.load(path)?;
    let has_label = rows.first().is_some_and(|r| r.contains_key("label"));
    if has_label {
        return rows
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                let id = row.get("id").map(id_string).unwrap_or_else(|| (i + 1).to_string());
                match row.get("label") {
                    Some(Value::String(s)) => Ok((id, s.clone())),
                    Some(v @ (Value::Number(_) | Value::Bool(_))) => Ok((id, v.to_string())),
                    _ => Err(usage(format!("{}: line {}: missing label", path.display(), i + 1))),
                }
            })
            .collect();
    }
    let scores = load_scores(io, path, "score")?;
    let values: Vec<f64> = scores.iter().map(|(_, v)| *v).collect();
    let binned = uniform_bins(&values, bins).map_err(stat_error)?;
    Ok(scores.into_iter().zip(binned).map(|((id, _), b)| (id, b.to_string())).collect())
}

fn id_string(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn kappa(io: &mut Io<'_>, a: &Path, b: &Path, bins: usize) -> Result<(), CliError> {
    let la = load_labels(io, a, bins)?;
    let lb = load_labels(io, b, bins)?;
    let lookup: HashMap<&str, &str> = lb.iter().map(|(id, l)| (id.as_str(), l.as_str())).collect();
    let mut xa = Vec::with_capacity(la.len());
    let mut xb = Vec::with_capacity(la.len());
    for (id, l) in &la {
        let other = lookup.get(id.as_str()).ok_or_else(|| usage(format!("id {id} has no counterpart")))?;
        xa.push(l.as_str());
        xb.push(*other);
    }
    if xa.len() != lb.len() {
        return Err(usage("files cover different ids"));
    }
    let k: f64 = cohens_kappa(&xa, &xb).map_err(stat_error)?;
    io.emit_json(&json!({"n": xa.len(), "kappa": k}))?;
    io.summary(json!({"command": "kappa", "n": xa.len()}))
}

fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || usage(format!("bad --range {s:?}; expected lo,hi"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn hist(io: &mut Io<'_>, input: &Path, bins: usize, range: &str, csv: Option<&Path>, bars: bool) -> Result<(), CliError> {
    let range = parse_range(range)?;
    let values: Vec<f64> = load_scores(io, input, "score")?.into_iter().map(|(_, v)| v).collect();
    let h = similarity_histogram(&values, bins, range).map_err(stat_error)?;
    if let Some(path) = csv {
        let path = io.path(path);
        write_atomic(&path, h.to_csv().as_bytes()).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    }
    if bars {
        io.emit(h.render_bars(40).as_bytes())?;
    } else {
        io.emit_json(&h)?;
    }
    io.summary(json!({
        "command": "hist",
        "total": h.total,
        "proportion_at_least_0_8": h.proportion_at_least_0_8,
    }))
}

fn diversity_cmd(cfg: &RunConfig, io: &mut Io<'_>, input: &Path) -> Result<(), CliError> {
    let records: Vec<ReportRecord> = io.load(input)?;
    let texts: Vec<&str> = records.iter().map(|r| r.text.as_str()).collect();
    let p = embedding(cfg)?;
    let d = diversity(&texts, p.embedder.as_ref(), &p.cache).map_err(stat_error)?;
    io.emit_json(&d)?;
    io.summary(json!({"command": "diversity", "reports": records.len()}))
}

fn sample(cfg: &RunConfig, io: &mut Io<'_>, input: &Path, count: usize) -> Result<(), CliError> {
    let records: Vec<Value> = io.load(input)?;
    let picked = sample_export(&records, count, cfg.seed);
    io.emit_records(&picked)?;
    io.summary(json!({"command": "sample-export", "input": records.len(), "count": picked.len(), "seed": cfg.seed}))
}
