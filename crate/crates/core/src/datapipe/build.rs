use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::chat::ChatProvider;
use super::dedup::deduplicate;
use super::refine::{refine_batch, RefineOptions, RoundStats};
use super::{LaymanPair, PairStatus, PipelineError, DEFAULT_THRESHOLD};
use crate::embedkit::{EmbeddingCache, EmbeddingProvider};
use crate::jsonl::{load_jsonl, to_jsonl_bytes, write_atomic};
use crate::textcore::{segment_report, split_sentences, tokenize, SentenceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    #[default]
    Sentence,
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildConfig {
    pub level: Level,
    pub refine: RefineOptions,
    pub dedup_threshold: f64,
    pub seed: u64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self {
            level: Level::Sentence,
            refine: RefineOptions::default(),
            dedup_threshold: DEFAULT_THRESHOLD,
            seed: 0,
        }
    }
}

/// Output file plus the partial-output and checkpoint files kept beside it
/// while a run is in progress.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildPaths {
    pub output: PathBuf,
    pub partial: PathBuf,
    pub checkpoint: PathBuf,
}

impl BuildPaths {
    pub fn for_output(output: impl AsRef<Path>) -> Self {
        let output = output.as_ref().to_path_buf();
        let with_suffix = |s: &str| {
            let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
            name.push(s);
            output.with_file_name(name)
        };
        Self {
            partial: with_suffix(".partial"),
            checkpoint: with_suffix(".checkpoint.json"),
            output,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DedupStats {
    pub input: usize,
    pub kept: usize,
    pub dropped: usize,
    pub degenerate: usize,
    pub comparisons: usize,
}

/// Per-round point of the refinement curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub round: usize,
    /// Share of all items accepted by the end of this round.
    pub cumulative_acceptance_rate: f64,
    /// Share of this round's active items the self-check revised.
    pub modification_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunStats {
    pub level: Level,
    pub items: usize,
    pub completed: usize,
    pub accepted: usize,
    pub flagged: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dedup: Option<DedupStats>,
    pub rounds: Vec<RoundStats>,
    pub curve: Vec<CurvePoint>,
}

impl RunStats {
    /// Adds a finished chunk of pairs and its round counts.
    pub fn record(&mut self, pairs: &[LaymanPair], rounds: &[RoundStats]) {
        self.completed += pairs.len();
        self.accepted += pairs.iter().filter(|p| p.status == PairStatus::Accepted).count();
        self.flagged += pairs.iter().filter(|p| p.status == PairStatus::Flagged).count();
        RoundStats::merge_into(&mut self.rounds, rounds);
        self.curve = curve(&self.rounds, self.completed);
    }
}

fn curve(rounds: &[RoundStats], total: usize) -> Vec<CurvePoint> {
    let mut cumulative = 0;
    rounds
        .iter()
        .map(|r| {
            cumulative += r.accepted;
            CurvePoint {
                round: r.round,
                cumulative_acceptance_rate: if total == 0 { 0.0 } else { cumulative as f64 / total as f64 },
                modification_rate: if r.active == 0 { 0.0 } else { r.modified as f64 / r.active as f64 },
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub last_completed_id: Option<String>,
    pub completed_count: usize,
    pub seed: u64,
    /// Digest of the configuration and work items; a resume must match it.
    pub fingerprint: String,
    pub stats: RunStats,
}

/// Reads an `{id, text}` (or sentence-record) JSON-lines corpus.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<SentenceRecord>, PipelineError> {
    Ok(load_jsonl(path)?)
}

fn fingerprint(config: &BuildConfig, items: &[(String, String)]) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(config).expect("config serializes"));
    for (id, text) in items {
        h.update(id.as_bytes());
        h.update([0]);
        h.update(text.as_bytes());
        h.update([0]);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn write_checkpoint(path: &Path, cp: &Checkpoint) -> Result<(), PipelineError> {
    let bytes = serde_json::to_vec_pretty(cp).expect("checkpoint serializes");
    write_atomic(path, &bytes).map_err(|e| PipelineError::io(path.display().to_string(), e))
}

/// Keeps the first `lines` lines of the partial output.
fn truncate_partial(path: &Path, lines: usize) -> Result<(), PipelineError> {
    let io = |e| PipelineError::io(path.display().to_string(), e);
    let file = File::open(path).map_err(io)?;
    let mut keep = 0u64;
    let mut reader = BufReader::new(file);
    let mut buf = String::new();
    for _ in 0..lines {
        buf.clear();
        let read = reader.read_line(&mut buf).map_err(io)?;
        if read == 0 || !buf.ends_with('\n') {
            return Err(PipelineError::CheckpointMismatch(format!(
                "{} holds fewer than {lines} complete records",
                path.display()
            )));
        }
        keep += read as u64;
    }
    OpenOptions::new().write(true).open(path).map_err(io)?.set_len(keep).map_err(io)
}

/// `(id, text)` items to refine.
type WorkItems = Vec<(String, String)>;

/// Expands the corpus into refinement work items, deduplicating at sentence level.
fn work_items(
    corpus: &[SentenceRecord],
    config: &BuildConfig,
    embedder: &dyn EmbeddingProvider,
    cache: &EmbeddingCache,
) -> Result<(WorkItems, Option<DedupStats>), PipelineError> {
    match config.level {
        Level::Report => Ok((corpus.iter().map(|r| (r.id.clone(), r.text.clone())).collect(), None)),
        Level::Sentence => {
            let sentences: Vec<SentenceRecord> = corpus
                .iter()
                .flat_map(|r| {
                    if r.report_id.is_some() {
                        vec![r.clone()]
                    } else {
                        segment_report(&r.id, &r.text)
                    }
                })
                .collect();
            let result = deduplicate(&sentences, config.dedup_threshold, embedder, cache)?;
            let stats = DedupStats {
                input: sentences.len(),
                kept: result.kept.len(),
                dropped: result.dropped,
                degenerate: result.degenerate,
                comparisons: result.comparisons,
            };
            Ok((result.kept.into_iter().map(|s| (s.id, s.text)).collect(), Some(stats)))
        }
    }
}

/// Builds a layman dataset from `corpus` into `paths.output`.
///
/// Work proceeds in chunks of `config.refine.batch_size`; after each chunk the
/// records are appended to the partial file and the checkpoint is rewritten.
/// With `resume`, a run restarts after the last completed chunk of a previous
/// run with the same configuration and input. The output file only appears
/// once the run completes.
pub fn build_dataset(
    corpus: &[SentenceRecord],
    config: &BuildConfig,
    chat: &dyn ChatProvider,
    embedder: &dyn EmbeddingProvider,
    cache: &EmbeddingCache,
    paths: &BuildPaths,
    resume: bool,
) -> Result<RunStats, PipelineError> {
    if config.refine.batch_size == 0 {
        return Err(PipelineError::Precondition("batch size must be at least 1".into()));
    }
    let (items, dedup) = work_items(corpus, config, embedder, cache)?;
    let fp = fingerprint(config, &items);
    let partial_io = |e| PipelineError::io(paths.partial.display().to_string(), e);

    let mut cp = if resume && paths.checkpoint.exists() {
        let text = std::fs::read_to_string(&paths.checkpoint)
            .map_err(|e| PipelineError::io(paths.checkpoint.display().to_string(), e))?;
        let cp: Checkpoint = serde_json::from_str(&text)
            .map_err(|e| PipelineError::CheckpointMismatch(format!("unreadable checkpoint: {e}")))?;
        if cp.fingerprint != fp {
            return Err(PipelineError::CheckpointMismatch(
                "configuration or input differs from the interrupted run".into(),
            ));
        }
        truncate_partial(&paths.partial, cp.completed_count)?;
        log::info!("resuming after {} of {} items", cp.completed_count, items.len());
        cp
    } else {
        File::create(&paths.partial).map_err(partial_io)?;
        let cp = Checkpoint {
            last_completed_id: None,
            completed_count: 0,
            seed: config.seed,
            fingerprint: fp,
            stats: RunStats {
                level: config.level,
                items: items.len(),
                dedup,
                ..Default::default()
            },
        };
        write_checkpoint(&paths.checkpoint, &cp)?;
        cp
    };

    let mut out = OpenOptions::new().append(true).open(&paths.partial).map_err(partial_io)?;
    for chunk in items[cp.completed_count..].chunks(config.refine.batch_size) {
        let outcome = refine_batch(chunk, &config.refine, chat, embedder, cache)?;
        out.write_all(&to_jsonl_bytes(&outcome.pairs)).map_err(partial_io)?;
        out.sync_data().map_err(partial_io)?;
        cp.completed_count += chunk.len();
        cp.last_completed_id = chunk.last().map(|(id, _)| id.clone());
        cp.stats.record(&outcome.pairs, &outcome.rounds);
        write_checkpoint(&paths.checkpoint, &cp)?;
        log::info!("refined {}/{} items", cp.completed_count, items.len());
    }
    drop(out);

    std::fs::rename(&paths.partial, &paths.output)
        .map_err(|e| PipelineError::io(paths.output.display().to_string(), e))?;
    std::fs::remove_file(&paths.checkpoint).map_err(|e| PipelineError::io(paths.checkpoint.display().to_string(), e))?;
    Ok(cp.stats)
}

/// Size statistics of a finished dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub count: usize,
    pub accepted: usize,
    pub flagged: usize,
    pub avg_words_professional: f64,
    pub avg_words_layman: f64,
    pub avg_sentences_professional: f64,
    pub avg_sentences_layman: f64,
}

pub fn dataset_stats(pairs: &[LaymanPair]) -> DatasetStats {
    let n = pairs.len().max(1) as f64;
    let avg = |f: &dyn Fn(&LaymanPair) -> usize| pairs.iter().map(f).sum::<usize>() as f64 / n;
    DatasetStats {
        count: pairs.len(),
        accepted: pairs.iter().filter(|p| p.status == PairStatus::Accepted).count(),
        flagged: pairs.iter().filter(|p| p.status == PairStatus::Flagged).count(),
        avg_words_professional: avg(&|p| tokenize(&p.professional).len()),
        avg_words_layman: avg(&|p| tokenize(&p.layman).len()),
        avg_sentences_professional: avg(&|p| split_sentences(&p.professional).len()),
        avg_sentences_layman: avg(&|p| split_sentences(&p.layman).len()),
    }
}

/// Lists every way `pairs` breaks the dataset contract; empty means valid.
pub fn validate_dataset(pairs: &[LaymanPair], threshold: f64, max_iterations: usize) -> Vec<String> {
    let mut problems = Vec::new();
    let mut ids = HashSet::new();
    for p in pairs {
        if !ids.insert(p.id.as_str()) {
            problems.push(format!("{}: duplicate id", p.id));
        }
        if p.professional.trim().is_empty() || p.layman.trim().is_empty() {
            problems.push(format!("{}: empty text", p.id));
        }
        if !(-1.0..=1.0).contains(&p.similarity) {
            problems.push(format!("{}: similarity {} outside [-1, 1]", p.id, p.similarity));
        }
        if p.status == PairStatus::Accepted && p.similarity < threshold {
            problems.push(format!("{}: accepted with similarity {} below {threshold}", p.id, p.similarity));
        }
        if p.status == PairStatus::Pending {
            problems.push(format!("{}: still pending", p.id));
        }
        if p.iterations == 0 || p.iterations > max_iterations {
            problems.push(format!("{}: {} iterations outside 1..={max_iterations}", p.id, p.iterations));
        }
    }
    problems
}
