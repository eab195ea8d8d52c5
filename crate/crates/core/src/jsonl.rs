//! JSON-lines reading and atomic file writing.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum JsonlError {
    #[error("{path}: line {line}: {reason}")]
    Malformed { path: String, line: usize, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

/// Parses JSON-lines text; blank lines are skipped. `origin` names the source
/// in error messages.
pub fn parse_jsonl<T: DeserializeOwned>(origin: &str, reader: impl BufRead) -> Result<Vec<T>, JsonlError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| JsonlError::Io {
            path: origin.to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| JsonlError::Malformed {
            path: origin.to_string(),
            line: idx + 1,
            reason: e.to_string(),
        })?;
        out.push(value);
    }
    Ok(out)
}

pub fn load_jsonl<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>, JsonlError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| JsonlError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_jsonl(&path.display().to_string(), BufReader::new(file))
}

/// One compact JSON object per line, `\n`-terminated.
pub fn to_jsonl_bytes<T: Serialize>(records: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r).expect("records serialize");
        out.push(b'\n');
    }
    out
}

pub fn write_jsonl<T: Serialize>(records: &[T], path: impl AsRef<Path>) -> Result<(), JsonlError> {
    let path = path.as_ref();
    write_atomic(path, &to_jsonl_bytes(records)).map_err(|source| JsonlError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes `bytes` to a temp file in the target directory, syncs, then renames
/// over `path`. A failure before the rename leaves any existing file intact.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    write_atomic_with(path, |f| f.write_all(bytes))
}

pub(crate) fn write_atomic_with(path: &Path, fill: impl FnOnce(&mut File) -> io::Result<()>) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    fill(tmp.as_file_mut())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
