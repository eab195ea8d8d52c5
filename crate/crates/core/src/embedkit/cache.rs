//! Append-only embedding cache.
//!
//! Record layout, little-endian: 16-byte key, `u32` dim, `dim` × `f32`.
//! The in-memory index is rebuilt on open; an incomplete trailing record
//! (a crash mid-append) is truncated away with a warning.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use sha2::{Digest, Sha256};

pub type CacheKey = [u8; 16];

/// Upper bound on a plausible embedding width; larger dims mark corruption.
const MAX_DIM: u32 = 1 << 16;

/// Trims and collapses internal whitespace runs to one space.
pub fn normalize_text(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// First 16 bytes of SHA-256 over `provider_id NUL normalized_text`.
pub fn cache_key(provider_id: &str, text: &str) -> CacheKey {
    let mut h = Sha256::new();
    h.update(provider_id.as_bytes());
    h.update([0u8]);
    h.update(normalize_text(text).as_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 16];
    key.copy_from_slice(&digest[..16]);
    key
}

#[derive(Debug, Clone, PartialEq)]
pub struct CacheRecord {
    pub key: CacheKey,
    pub values: Vec<f32>,
}

fn encode(out: &mut Vec<u8>, key: &CacheKey, values: &[f32]) {
    out.extend_from_slice(key);
    out.extend_from_slice(&(values.len() as u32).to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

/// Parses records from `bytes`; returns them plus the length of the valid prefix.
fn decode(bytes: &[u8]) -> (Vec<CacheRecord>, usize) {
    let mut records = Vec::new();
    let mut pos = 0usize;
    while bytes.len() - pos >= 20 {
        let mut key = [0u8; 16];
        key.copy_from_slice(&bytes[pos..pos + 16]);
        let dim = u32::from_le_bytes(bytes[pos + 16..pos + 20].try_into().expect("4 bytes"));
        if dim == 0 || dim > MAX_DIM {
            break;
        }
        let end = pos + 20 + dim as usize * 4;
        if end > bytes.len() {
            break;
        }
        let values = bytes[pos + 20..end]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect();
        records.push(CacheRecord { key, values });
        pos = end;
    }
    (records, pos)
}

/// Reads every complete record of a record file.
pub fn read_records(path: &Path) -> io::Result<Vec<CacheRecord>> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    let (records, valid) = decode(&bytes);
    if valid != bytes.len() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("{}: corrupt record at byte {valid}", path.display()),
        ));
    }
    Ok(records)
}

/// Writes records atomically (temp file + rename).
pub fn write_records(path: &Path, records: &[CacheRecord]) -> io::Result<()> {
    let mut bytes = Vec::new();
    for r in records {
        encode(&mut bytes, &r.key, &r.values);
    }
    crate::jsonl::write_atomic(path, &bytes)
}

/// Thread-safe embedding cache, optionally persisted to an append-only file.
#[derive(Debug)]
pub struct EmbeddingCache {
    entries: RwLock<HashMap<CacheKey, Vec<f32>>>,
    writer: Mutex<Option<BufWriter<File>>>,
    path: Option<PathBuf>,
}

impl Default for EmbeddingCache {
    fn default() -> Self {
        Self::in_memory()
    }
}

impl EmbeddingCache {
    pub fn in_memory() -> Self {
        Self {
            entries: RwLock::new(HashMap::new()),
            writer: Mutex::new(None),
            path: None,
        }
    }

    /// Opens (or creates) a cache file and loads its records.
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref();
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        let mut file = OpenOptions::new().read(true).create(true).append(true).open(path)?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes)?;
        let (records, valid) = decode(&bytes);
        if valid != bytes.len() {
            log::warn!(
                "{}: truncating {} bytes of incomplete trailing record",
                path.display(),
                bytes.len() - valid
            );
            file.set_len(valid as u64)?;
        }
        let entries = records.into_iter().map(|r| (r.key, r.values)).collect();
        Ok(Self {
            entries: RwLock::new(entries),
            writer: Mutex::new(Some(BufWriter::new(file))),
            path: Some(path.to_path_buf()),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &CacheKey) -> Option<Vec<f32>> {
        self.entries.read().expect("cache lock").get(key).cloned()
    }

    pub fn insert(&self, key: CacheKey, values: Vec<f32>) -> io::Result<()> {
        self.insert_many(vec![(key, values)])
    }

    /// Adds entries not yet present, appending them to the file before they
    /// become visible to readers.
    pub fn insert_many(&self, items: Vec<(CacheKey, Vec<f32>)>) -> io::Result<()> {
        let mut writer = self.writer.lock().expect("cache writer lock");
        let fresh: Vec<(CacheKey, Vec<f32>)> = {
            let entries = self.entries.read().expect("cache lock");
            let mut seen = std::collections::HashSet::new();
            items
                .into_iter()
                .filter(|(k, _)| !entries.contains_key(k) && seen.insert(*k))
                .collect()
        };
        if fresh.is_empty() {
            return Ok(());
        }
        if let Some(w) = writer.as_mut() {
            let mut bytes = Vec::new();
            for (k, v) in &fresh {
                encode(&mut bytes, k, v);
            }
            w.write_all(&bytes)?;
            w.flush()?;
        }
        let mut entries = self.entries.write().expect("cache lock");
        entries.extend(fresh);
        Ok(())
    }
}
