use std::path::{Path, PathBuf};

use crate::datapipe::LaymanPair;
use crate::embedkit::{
    cache_key, embed, read_records, EmbedError, write_records, CacheRecord, EmbeddingCache, EmbeddingProvider, Vector,
};
use crate::jsonl::{load_jsonl, write_jsonl};

use super::SemevalError;

/// Professional-to-layman sentence table with one embedding per professional
/// sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct LaymanIndex {
    pub entries: Vec<(String, String)>,
    pub vectors: Vec<Vector>,
    pub provider_id: String,
}

impl LaymanIndex {
    pub fn build(
        entries: Vec<(String, String)>,
        provider: &dyn EmbeddingProvider,
        cache: &EmbeddingCache,
    ) -> Result<Self, SemevalError> {
        if entries.is_empty() {
            return Err(SemevalError::EmptyIndex);
        }
        let texts: Vec<&str> = entries.iter().map(|(p, _)| p.as_str()).collect();
        let vectors = embed(&texts, provider, cache)?;
        Ok(Self {
            entries,
            vectors,
            provider_id: provider.id().to_string(),
        })
    }

    pub fn from_pairs(
        pairs: &[LaymanPair],
        provider: &dyn EmbeddingProvider,
        cache: &EmbeddingCache,
    ) -> Result<Self, SemevalError> {
        let entries = pairs.iter().map(|p| (p.professional.clone(), p.layman.clone())).collect();
        Self::build(entries, provider, cache)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Conventional sidecar vector file for a dataset file.
    pub fn sidecar_path(dataset: &Path) -> PathBuf {
        let mut name = dataset.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".vectors");
        dataset.with_file_name(name)
    }

    /// Loads a dataset file, taking vectors from its sidecar when present.
    /// Sidecar records are keyed by provider and text, so vectors from a
    /// different provider are never used; missing ones are embedded afresh.
    pub fn load(
        dataset: &Path,
        provider: &dyn EmbeddingProvider,
        cache: &EmbeddingCache,
    ) -> Result<Self, SemevalError> {
        let pairs: Vec<LaymanPair> = load_jsonl(dataset)?;
        let sidecar = Self::sidecar_path(dataset);
        if sidecar.exists() {
            let records = read_records(&sidecar).map_err(EmbedError::Cache)?;
            cache
                .insert_many(records.into_iter().map(|r| (r.key, r.values)).collect())
                .map_err(EmbedError::Cache)?;
        }
        Self::from_pairs(&pairs, provider, cache)
    }

    /// Writes the entries as a dataset file plus its sidecar vector file.
    pub fn save(&self, dataset: &Path) -> Result<(), SemevalError> {
        let pairs: Vec<LaymanPair> = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, (p, l))| LaymanPair {
                id: i.to_string(),
                professional: p.clone(),
                layman: l.clone(),
                similarity: 1.0,
                status: crate::datapipe::PairStatus::Accepted,
                iterations: 1,
            })
            .collect();
        write_jsonl(&pairs, dataset)?;
        self.save_vectors(&Self::sidecar_path(dataset))
    }

    /// Writes only the sidecar vector file.
    pub fn save_vectors(&self, path: &Path) -> Result<(), SemevalError> {
        let records: Vec<CacheRecord> = self
            .entries
            .iter()
            .zip(&self.vectors)
            .map(|((p, _), v)| CacheRecord {
                key: cache_key(&self.provider_id, p),
                values: v.values.iter().map(|&x| x as f32).collect(),
            })
            .collect();
        write_records(path, &records).map_err(|e| SemevalError::Embed(e.into()))
    }
}
