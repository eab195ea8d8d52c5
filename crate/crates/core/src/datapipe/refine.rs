use serde::{Deserialize, Serialize};

use super::chat::ChatProvider;
use super::translate::{self_check_batch, translate_batch, Verdict};
use super::{LaymanPair, PairStatus, PipelineError, DEFAULT_BATCH_SIZE, DEFAULT_MAX_ITERATIONS, DEFAULT_THRESHOLD};
use crate::embedkit::{cosine, embed_lenient, EmbeddingCache, EmbeddingProvider};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineOptions {
    pub threshold: f64,
    pub max_iterations: usize,
    /// Translate afresh every round instead of carrying the self-check revision forward.
    pub retranslate: bool,
    pub batch_size: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            retranslate: false,
            batch_size: DEFAULT_BATCH_SIZE,
        }
    }
}

/// Counts for one refinement round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RoundStats {
    pub round: usize,
    /// Pairs still unresolved when the round started.
    pub active: usize,
    /// Pairs accepted in this round.
    pub accepted: usize,
    /// Pairs the self-check revised in this round.
    pub modified: usize,
}

impl RoundStats {
    /// Adds `other`'s counts into `rounds`, aligning by round number.
    pub fn merge_into(rounds: &mut Vec<RoundStats>, other: &[RoundStats]) {
        for r in other {
            while rounds.len() < r.round {
                let round = rounds.len() + 1;
                rounds.push(RoundStats { round, ..Default::default() });
            }
            let slot = &mut rounds[r.round - 1];
            slot.active += r.active;
            slot.accepted += r.accepted;
            slot.modified += r.modified;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineOutcome {
    pub pairs: Vec<LaymanPair>,
    pub rounds: Vec<RoundStats>,
}

fn in_round<T>(round: usize, r: Result<T, impl Into<PipelineError>>) -> Result<T, PipelineError> {
    r.map_err(|e| PipelineError::Round {
        round,
        source: Box::new(e.into()),
    })
}

/// Refines a batch of `(id, professional)` items round by round.
///
/// Round 1 translates every item. Each round measures cosine(professional,
/// candidate) and self-checks the candidate; an item is accepted when the
/// similarity reaches the threshold and the self-check leaves it unchanged.
/// Otherwise the next round's candidate is the self-check revision (or a new
/// translation with `retranslate`). Items unresolved after `max_iterations`
/// rounds are flagged with their most similar candidate.
pub fn refine_batch(
    items: &[(String, String)],
    opts: &RefineOptions,
    chat: &dyn ChatProvider,
    embedder: &dyn EmbeddingProvider,
    cache: &EmbeddingCache,
) -> Result<RefineOutcome, PipelineError> {
    if opts.max_iterations == 0 {
        return Err(PipelineError::Precondition("max_iterations must be at least 1".into()));
    }
    if let Some((id, _)) = items.iter().find(|(_, p)| p.trim().is_empty()) {
        return Err(PipelineError::Precondition(format!("item {id} has empty text")));
    }
    let professionals: Vec<&str> = items.iter().map(|(_, p)| p.as_str()).collect();
    let prof_vecs = embed_lenient(&professionals, embedder, cache)?;
    if let Some(i) = prof_vecs.iter().position(Option::is_none) {
        return Err(PipelineError::Precondition(format!(
            "item {} cannot be embedded (no tokens)",
            items[i].0
        )));
    }

    let n = items.len();
    let mut done: Vec<Option<LaymanPair>> = vec![None; n];
    let mut best: Vec<Option<(f64, String)>> = vec![None; n];
    let mut carried: Vec<Option<String>> = vec![None; n];
    let mut rounds = Vec::new();
    let mut active: Vec<usize> = (0..n).collect();

    for round in 1..=opts.max_iterations {
        if active.is_empty() {
            break;
        }
        let candidates: Vec<String> = if round == 1 || opts.retranslate {
            let src: Vec<&str> = active.iter().map(|&i| professionals[i]).collect();
            in_round(round, translate_batch(&src, chat, opts.batch_size))?
        } else {
            active.iter().map(|&i| carried[i].take().expect("carried from previous round")).collect()
        };

        let texts: Vec<&str> = candidates.iter().map(String::as_str).collect();
        let cand_vecs = in_round(round, embed_lenient(&texts, embedder, cache))?;
        let pairs: Vec<(&str, &str)> = active.iter().zip(&texts).map(|(&i, &t)| (professionals[i], t)).collect();
        let verdicts = in_round(round, self_check_batch(&pairs, chat, opts.batch_size))?;

        let mut stats = RoundStats {
            round,
            active: active.len(),
            ..Default::default()
        };
        let mut still = Vec::new();
        for (((&i, cand), vec), verdict) in active.iter().zip(candidates).zip(cand_vecs).zip(verdicts) {
            let prof = prof_vecs[i].as_ref().expect("checked above");
            let sim = match vec {
                Some(v) => in_round(round, cosine(prof, &v))?,
                None => -1.0,
            };
            if best[i].as_ref().is_none_or(|(b, _)| sim > *b) {
                best[i] = Some((sim, cand.clone()));
            }
            if !verdict.is_unchanged() {
                stats.modified += 1;
            }
            if sim >= opts.threshold && verdict.is_unchanged() {
                stats.accepted += 1;
                done[i] = Some(LaymanPair {
                    id: items[i].0.clone(),
                    professional: items[i].1.clone(),
                    layman: cand,
                    similarity: sim,
                    status: PairStatus::Accepted,
                    iterations: round,
                });
            } else {
                carried[i] = Some(match verdict {
                    Verdict::Revised(r) => r,
                    Verdict::Unchanged => cand,
                });
                still.push(i);
            }
        }
        rounds.push(stats);
        active = still;
    }

    let iterations = rounds.len();
    for i in active {
        let (sim, text) = best[i].take().expect("every active item ran a round");
        done[i] = Some(LaymanPair {
            id: items[i].0.clone(),
            professional: items[i].1.clone(),
            layman: text,
            similarity: sim,
            status: PairStatus::Flagged,
            iterations,
        });
    }
    Ok(RefineOutcome {
        pairs: done.into_iter().map(|p| p.expect("every item resolved")).collect(),
        rounds,
    })
}

/// Single-item [`refine_batch`].
pub fn refine(
    id: &str,
    professional: &str,
    opts: &RefineOptions,
    chat: &dyn ChatProvider,
    embedder: &dyn EmbeddingProvider,
    cache: &EmbeddingCache,
) -> Result<LaymanPair, PipelineError> {
    let mut out = refine_batch(&[(id.to_string(), professional.to_string())], opts, chat, embedder, cache)?;
    Ok(out.pairs.pop().expect("one pair per item"))
}
