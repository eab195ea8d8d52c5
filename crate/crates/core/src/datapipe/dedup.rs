use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::embedkit::{cosine, embed_lenient, EmbeddingCache, EmbeddingProvider, Vector};
use crate::textcore::SentenceRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DedupResult {
    pub kept: Vec<SentenceRecord>,
    /// Near-duplicates removed.
    pub dropped: usize,
    /// Sentences removed because they could not be embedded.
    pub degenerate: usize,
    /// Cosine evaluations performed.
    pub comparisons: usize,
}

/// Greedy single-pass filter: a sentence survives iff its cosine with every
/// earlier survivor is at most `threshold`.
pub fn deduplicate(
    sentences: &[SentenceRecord],
    threshold: f64,
    provider: &dyn EmbeddingProvider,
    cache: &EmbeddingCache,
) -> Result<DedupResult, PipelineError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(PipelineError::Precondition(format!("threshold {threshold} outside (0, 1]")));
    }
    let texts: Vec<&str> = sentences.iter().map(|s| s.text.as_str()).collect();
    let vectors = embed_lenient(&texts, provider, cache)?;

    let mut kept = Vec::new();
    let mut kept_vecs: Vec<Vector> = Vec::new();
    let (mut dropped, mut degenerate, mut comparisons) = (0, 0, 0);
    for (record, vec) in sentences.iter().zip(vectors) {
        let Some(v) = vec else {
            log::warn!("dropping sentence {} with no embeddable tokens", record.id);
            degenerate += 1;
            continue;
        };
        let mut duplicate = false;
        for k in &kept_vecs {
            comparisons += 1;
            if cosine(&v, k)? > threshold {
                duplicate = true;
                break;
            }
        }
        if duplicate {
            dropped += 1;
        } else {
            kept.push(record.clone());
            kept_vecs.push(v);
        }
    }
    Ok(DedupResult {
        kept,
        dropped,
        degenerate,
        comparisons,
    })
}
