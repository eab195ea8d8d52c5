//! Embedding providers, cosine similarity and a persistent embedding cache.
//!
//! [`embed`] is the single entry point the pipelines use: it consults the
//! cache, batches misses to the provider, and stores every vector at `f32`
//! precision so a warm cache returns exactly what a cold one would.

mod cache;
mod local;
mod provider;
mod vector;

pub use cache::{cache_key, normalize_text, read_records, write_records, CacheKey, CacheRecord, EmbeddingCache};
pub use local::{fnv1a64, local_embed, LocalEmbedder, MIN_LOCAL_DIM};
pub use provider::{
    EmbeddingProvider, EmbeddingProviderSpec, ProviderKind, RemoteEmbedder, TableEmbedder,
};
pub use vector::{cosine, cosine_slices, Vector};

#[derive(Debug, thiserror::Error)]
pub enum EmbedError {
    #[error("degenerate vector")]
    DegenerateVector,
    #[error("provider mismatch: {0} vs {1}")]
    ProviderMismatch(String, String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("provider unavailable after {attempts} attempts: {reason}")]
    ProviderUnavailable { attempts: u32, reason: String },
    #[error("malformed provider response: {0}")]
    BadResponse(String),
    #[error("no embedding for text {0:?}")]
    UnknownText(String),
    #[error("invalid provider configuration: {0}")]
    Config(String),
    #[error("embedding cache: {0}")]
    Cache(#[from] std::io::Error),
}

/// Embeds `texts` in order, reading and filling `cache`.
///
/// Cache misses are de-duplicated and sent to the provider in batches of at
/// most `provider.max_batch()`. Returned values are rounded to `f32`.
pub fn embed(
    texts: &[&str],
    provider: &dyn EmbeddingProvider,
    cache: &EmbeddingCache,
) -> Result<Vec<Vector>, EmbedError> {
    let provider_id = provider.id().to_string();
    let keys: Vec<CacheKey> = texts.iter().map(|t| cache_key(&provider_id, t)).collect();

    let mut found: Vec<Option<Vec<f32>>> = keys.iter().map(|k| cache.get(k)).collect();
    let mut pending: Vec<usize> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, slot) in found.iter().enumerate() {
        if slot.is_none() && seen.insert(keys[i]) {
            pending.push(i);
        }
    }

    let max_batch = provider.max_batch().max(1);
    for chunk in pending.chunks(max_batch) {
        let batch: Vec<&str> = chunk.iter().map(|&i| texts[i]).collect();
        let vectors = provider.embed_batch(&batch)?;
        if vectors.len() != batch.len() {
            return Err(EmbedError::BadResponse(format!(
                "expected {} vectors, got {}",
                batch.len(),
                vectors.len()
            )));
        }
        let mut records = Vec::with_capacity(chunk.len());
        for (&i, values) in chunk.iter().zip(vectors) {
            if values.len() != provider.dim() {
                return Err(EmbedError::DimensionMismatch {
                    expected: provider.dim(),
                    got: values.len(),
                });
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(EmbedError::BadResponse("non-finite embedding value".into()));
            }
            records.push((keys[i], values.iter().map(|&v| v as f32).collect::<Vec<f32>>()));
        }
        cache.insert_many(records)?;
    }

    for (i, slot) in found.iter_mut().enumerate() {
        if slot.is_none() {
            *slot = cache.get(&keys[i]);
        }
    }
    found
        .into_iter()
        .map(|v| {
            let values = v.expect("every key filled after fetch");
            Ok(Vector::new(provider_id.clone(), values.into_iter().map(f64::from).collect()))
        })
        .collect()
}

/// Like [`embed`], but a text the provider cannot embed (zero tokens, or a
/// zero-norm vector) yields `None` instead of failing the whole batch.
pub fn embed_lenient(
    texts: &[&str],
    provider: &dyn EmbeddingProvider,
    cache: &EmbeddingCache,
) -> Result<Vec<Option<Vector>>, EmbedError> {
    let usable = |v: Vector| if v.norm() > 0.0 { Some(v) } else { None };
    match embed(texts, provider, cache) {
        Ok(vs) => Ok(vs.into_iter().map(usable).collect()),
        Err(EmbedError::DegenerateVector) => texts
            .iter()
            .map(|t| match embed(&[t], provider, cache) {
                Ok(mut v) => Ok(v.pop().and_then(usable)),
                Err(EmbedError::DegenerateVector) => Ok(None),
                Err(e) => Err(e),
            })
            .collect(),
        Err(e) => Err(e),
    }
}
