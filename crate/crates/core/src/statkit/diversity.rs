use serde::{Deserialize, Serialize};

use super::StatError;
use crate::embedkit::{cosine, embed, EmbeddingCache, EmbeddingProvider, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diversity {
    pub mean: f64,
    /// Population variance over all pairs.
    pub variance: f64,
    pub pairs: usize,
}

/// Mean and population variance of all pairwise cosines.
pub fn diversity_of_vectors(vectors: &[Vector]) -> Result<Diversity, StatError> {
    if vectors.len() < 2 {
        return Err(StatError::TooFewPoints { need: 2, got: vectors.len() });
    }
    let mut sims = Vec::with_capacity(vectors.len() * (vectors.len() - 1) / 2);
    for (i, a) in vectors.iter().enumerate() {
        for b in &vectors[i + 1..] {
            sims.push(cosine(a, b)?);
        }
    }
    let n = sims.len() as f64;
    let mean = sims.iter().sum::<f64>() / n;
    let variance = sims.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
    Ok(Diversity {
        mean,
        variance,
        pairs: sims.len(),
    })
}

/// Embeds each whole report and summarizes their pairwise similarity.
pub fn diversity(reports: &[&str], provider: &dyn EmbeddingProvider, cache: &EmbeddingCache) -> Result<Diversity, StatError> {
    if reports.len() < 2 {
        return Err(StatError::TooFewPoints { need: 2, got: reports.len() });
    }
    diversity_of_vectors(&embed(reports, provider, cache)?)
}
