use serde::{Deserialize, Serialize};

use super::SemevalError;
use crate::embedkit::{cosine_slices, embed_lenient, EmbeddingCache, EmbeddingProvider, Vector};
use crate::lexmetrics::harmonic_mean;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub candidate: usize,
    pub reference: usize,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// One entry per matched candidate sentence.
    pub matched_pairs: Vec<MatchedPair>,
    /// Each candidate sentence's highest similarity to any reference sentence.
    pub candidate_best: Vec<f64>,
}

fn sim(a: &Option<Vector>, b: &Option<Vector>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) => cosine_slices(&a.values, &b.values),
        _ => None,
    }
}

/// Counts the sentences of `from` having some sentence in `to` at
/// similarity >= `theta`, stopping at the first such sentence. Returns the
/// count and the recorded pairs as `(from, to, sim)`.
fn count_matched(
    from: &[Option<Vector>],
    to: &[Option<Vector>],
    theta: f64,
    best_match: bool,
) -> (usize, Vec<(usize, usize, f64)>) {
    let mut pairs = Vec::new();
    for (i, a) in from.iter().enumerate() {
        let mut first = None;
        for (j, b) in to.iter().enumerate() {
            if let Some(s) = sim(a, b).filter(|&s| s >= theta) {
                first = Some((j, s));
                break;
            }
        }
        let Some((j, s)) = first else { continue };
        let recorded = if best_match {
            to.iter()
                .enumerate()
                .filter_map(|(j, b)| sim(a, b).map(|s| (j, s)))
                .fold((j, s), |acc, x| if x.1 > acc.1 { x } else { acc })
        } else {
            (j, s)
        };
        pairs.push((i, recorded.0, recorded.1));
    }
    (pairs.len(), pairs)
}

/// Proportion of candidate sentences matched by some reference sentence
/// (precision), and of reference sentences matched by some candidate
/// sentence (recall), at cosine >= `theta`.
pub fn match_proportion<S: AsRef<str>>(
    candidate: &[S],
    reference: &[S],
    theta: f64,
    best_match: bool,
    provider: &dyn EmbeddingProvider,
    cache: &EmbeddingCache,
) -> Result<MatchResult, SemevalError> {
    if candidate.is_empty() || reference.is_empty() {
        return Err(SemevalError::EmptyReport);
    }
    let texts: Vec<&str> = candidate.iter().chain(reference).map(AsRef::as_ref).collect();
    let mut vectors = embed_lenient(&texts, provider, cache)?;
    let ref_vecs = vectors.split_off(candidate.len());
    let cand_vecs = vectors;

    let (p_count, pairs) = count_matched(&cand_vecs, &ref_vecs, theta, best_match);
    let (r_count, _) = count_matched(&ref_vecs, &cand_vecs, theta, false);
    let precision = p_count as f64 / candidate.len() as f64;
    let recall = r_count as f64 / reference.len() as f64;
    let candidate_best = cand_vecs
        .iter()
        .map(|a| ref_vecs.iter().filter_map(|b| sim(a, b)).fold(f64::NEG_INFINITY, f64::max))
        .map(|s| if s.is_finite() { s } else { 0.0 })
        .collect();
    Ok(MatchResult {
        precision,
        recall,
        f1: harmonic_mean(precision, recall),
        matched_pairs: pairs
            .into_iter()
            .map(|(candidate, reference, similarity)| MatchedPair {
                candidate,
                reference,
                similarity,
            })
            .collect(),
        candidate_best,
    })
}
