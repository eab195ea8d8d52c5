use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::cache::normalize_text;
use super::{fnv1a64, EmbedError, LocalEmbedder};
use crate::http::{Backoff, HttpTransport, UreqTransport};

/// Source of embedding vectors. Implementations are shared across threads.
pub trait EmbeddingProvider: Send + Sync {
    /// Stable identifier; vectors from different ids are never compared.
    fn id(&self) -> &str;
    fn dim(&self) -> usize;
    /// Largest number of texts per `embed_batch` call.
    fn max_batch(&self) -> usize;
    /// One vector per text, in order.
    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, EmbedError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ProviderKind {
    #[default]
    Local,
    RemoteHttp,
    Table,
}

/// Declarative provider configuration, as read from config files and flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingProviderSpec {
    pub provider_id: Option<String>,
    pub kind: ProviderKind,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub api_key: Option<String>,
    pub dim: usize,
    pub max_batch: usize,
    /// Prepended to every text sent to a remote model.
    pub instruction: String,
    pub table_path: Option<PathBuf>,
}

impl Default for EmbeddingProviderSpec {
    fn default() -> Self {
        Self {
            provider_id: None,
            kind: ProviderKind::Local,
            endpoint: None,
            model: None,
            api_key: None,
            dim: 256,
            max_batch: 64,
            instruction: String::new(),
            table_path: None,
        }
    }
}

impl EmbeddingProviderSpec {
    pub fn build(&self) -> Result<Arc<dyn EmbeddingProvider>, EmbedError> {
        match self.kind {
            ProviderKind::Local => Ok(Arc::new(LocalEmbedder::new(self.dim)?)),
            ProviderKind::RemoteHttp => {
                let endpoint = self
                    .endpoint
                    .clone()
                    .ok_or_else(|| EmbedError::Config("remote embedding provider needs an endpoint URL".into()))?;
                Ok(Arc::new(RemoteEmbedder::new(
                    self.clone(),
                    endpoint,
                    Arc::new(UreqTransport::default()),
                    Backoff::default(),
                )))
            }
            ProviderKind::Table => {
                let path = self
                    .table_path
                    .as_ref()
                    .ok_or_else(|| EmbedError::Config("table embedding provider needs a table path".into()))?;
                Ok(Arc::new(TableEmbedder::load(path)?))
            }
        }
    }
}

/// Embeddings-API client: POST `{model, input: [..]}`, read `data[i].embedding`.
pub struct RemoteEmbedder {
    id: String,
    endpoint: String,
    model: String,
    api_key: Option<String>,
    instruction: String,
    dim: usize,
    max_batch: usize,
    transport: Arc<dyn HttpTransport>,
    backoff: Backoff,
}

impl RemoteEmbedder {
    pub fn new(spec: EmbeddingProviderSpec, endpoint: String, transport: Arc<dyn HttpTransport>, backoff: Backoff) -> Self {
        let model = spec.model.clone().unwrap_or_else(|| "default".to_string());
        let id = spec.provider_id.clone().unwrap_or_else(|| {
            if spec.instruction.is_empty() {
                format!("remote:{model}")
            } else {
                format!("remote:{model}#{:016x}", fnv1a64(spec.instruction.as_bytes()))
            }
        });
        Self {
            id,
            endpoint,
            model,
            api_key: spec.api_key,
            instruction: spec.instruction,
            dim: spec.dim,
            max_batch: spec.max_batch.max(1),
            transport,
            backoff,
        }
    }

    fn parse(&self, resp: &Value, expected: usize) -> Result<Vec<Vec<f64>>, EmbedError> {
        let data = resp
            .get("data")
            .and_then(Value::as_array)
            .ok_or_else(|| EmbedError::BadResponse("missing `data` array".into()))?;
        if data.len() != expected {
            return Err(EmbedError::BadResponse(format!("expected {expected} embeddings, got {}", data.len())));
        }
        let mut items: Vec<(usize, Vec<f64>)> = Vec::with_capacity(data.len());
        for (pos, item) in data.iter().enumerate() {
            let index = item.get("index").and_then(Value::as_u64).map_or(pos, |i| i as usize);
            let values = item
                .get("embedding")
                .and_then(Value::as_array)
                .ok_or_else(|| EmbedError::BadResponse("missing `embedding`".into()))?
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| EmbedError::BadResponse("non-numeric embedding".into())))
                .collect::<Result<Vec<f64>, _>>()?;
            if values.len() != self.dim {
                return Err(EmbedError::DimensionMismatch {
                    expected: self.dim,
                    got: values.len(),
                });
            }
            items.push((index, values));
        }
        items.sort_by_key(|(i, _)| *i);
        Ok(items.into_iter().map(|(_, v)| v).collect())
    }
}

impl EmbeddingProvider for RemoteEmbedder {
    fn id(&self) -> &str {
        &self.id
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn max_batch(&self) -> usize {
        self.max_batch
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, EmbedError> {
        let input: Vec<String> = texts.iter().map(|t| format!("{}{}", self.instruction, t)).collect();
        let body = json!({ "model": self.model, "input": input });
        let resp = self
            .backoff
            .retry(|| self.transport.post_json(&self.endpoint, self.api_key.as_deref(), &body))
            .map_err(|(e, attempts)| EmbedError::ProviderUnavailable {
                attempts,
                reason: e.to_string(),
            })?;
        self.parse(&resp, texts.len())
    }
}

#[derive(Debug, Deserialize, Serialize)]
struct TableFile {
    provider_id: String,
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

/// Fixed text→vector table; unknown texts are an error.
///
/// File format: `{"provider_id": "...", "dim": n, "vectors": {"text": [..], ...}}`.
/// Texts are matched after whitespace normalization.
#[derive(Debug, Clone)]
pub struct TableEmbedder {
    id: String,
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl TableEmbedder {
    pub fn new(id: impl Into<String>, dim: usize) -> Self {
        Self {
            id: id.into(),
            dim,
            vectors: HashMap::new(),
        }
    }

    pub fn with(mut self, text: &str, values: Vec<f64>) -> Self {
        self.insert(text, values);
        self
    }

    pub fn insert(&mut self, text: &str, values: Vec<f64>) {
        assert_eq!(values.len(), self.dim, "table vector has wrong dimension");
        self.vectors.insert(normalize_text(text), values);
    }

    pub fn load(path: &Path) -> Result<Self, EmbedError> {
        let raw = std::fs::read_to_string(path)?;
        let file: TableFile =
            serde_json::from_str(&raw).map_err(|e| EmbedError::Config(format!("{}: {e}", path.display())))?;
        let mut table = Self::new(file.provider_id, file.dim);
        for (text, values) in file.vectors {
            if values.len() != file.dim {
                return Err(EmbedError::DimensionMismatch {
                    expected: file.dim,
                    got: values.len(),
                });
            }
            table.vectors.insert(normalize_text(&text), values);
        }
        Ok(table)
    }

    pub fn to_json(&self) -> Value {
        let mut vectors: Vec<(&String, &Vec<f64>)> = self.vectors.iter().collect();
        vectors.sort_by(|a, b| a.0.cmp(b.0));
        let map: serde_json::Map<String, Value> = vectors.into_iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        json!({ "provider_id": self.id, "dim": self.dim, "vectors": map })
    }
}

impl EmbeddingProvider for TableEmbedder {
    fn id(&self) -> &str {
        &self.id
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn max_batch(&self) -> usize {
        usize::MAX
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, EmbedError> {
        texts
            .iter()
            .map(|t| {
                self.vectors
                    .get(&normalize_text(t))
                    .cloned()
                    .ok_or_else(|| EmbedError::UnknownText((*t).to_string()))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::http::TransportError;
    use std::sync::Mutex;

    /// Fails the first `failures` calls, then answers with constant vectors.
    struct FlakyTransport {
        failures: Mutex<u32>,
        calls: Mutex<u32>,
        dim: usize,
    }

    impl HttpTransport for FlakyTransport {
        fn post_json(&self, _url: &str, _key: Option<&str>, body: &Value) -> Result<Value, TransportError> {
            *self.calls.lock().unwrap() += 1;
            let mut f = self.failures.lock().unwrap();
            if *f > 0 {
                *f -= 1;
                return Err(TransportError::Retryable("503".into()));
            }
            let n = body["input"].as_array().unwrap().len();
            let data: Vec<Value> = (0..n)
                .rev()
                .map(|i| json!({ "index": i, "embedding": vec![i as f64 + 1.0; self.dim] }))
                .collect();
            Ok(json!({ "data": data }))
        }
    }

    fn remote(failures: u32, dim_reply: usize) -> (RemoteEmbedder, Arc<FlakyTransport>) {
        let t = Arc::new(FlakyTransport {
            failures: Mutex::new(failures),
            calls: Mutex::new(0),
            dim: dim_reply,
        });
        let spec = EmbeddingProviderSpec {
            kind: ProviderKind::RemoteHttp,
            dim: 3,
            model: Some("m".into()),
            ..Default::default()
        };
        (RemoteEmbedder::new(spec, "http://x".into(), t.clone(), Backoff::immediate(5)), t)
    }

    #[test]
    fn remote_orders_by_index_and_retries() {
        let (p, t) = remote(2, 3);
        let out = p.embed_batch(&["a", "b"]).unwrap();
        assert_eq!(out, vec![vec![1.0; 3], vec![2.0; 3]]);
        assert_eq!(*t.calls.lock().unwrap(), 3);
        assert_eq!(p.id(), "remote:m");
    }

    #[test]
    fn remote_gives_up_after_five_attempts() {
        let (p, t) = remote(10, 3);
        let err = p.embed_batch(&["a"]).unwrap_err();
        assert!(matches!(err, EmbedError::ProviderUnavailable { attempts: 5, .. }));
        assert_eq!(*t.calls.lock().unwrap(), 5);
    }

    #[test]
    fn remote_dimension_check() {
        let (p, _) = remote(0, 4);
        assert!(matches!(p.embed_batch(&["a"]), Err(EmbedError::DimensionMismatch { expected: 3, got: 4 })));
    }

    #[test]
    fn table_lookup_and_roundtrip() {
        let t = TableEmbedder::new("fixture", 2).with("no  effusion", vec![1.0, 0.0]);
        assert_eq!(t.embed_batch(&["no effusion"]).unwrap(), vec![vec![1.0, 0.0]]);
        assert!(matches!(t.embed_batch(&["other"]), Err(EmbedError::UnknownText(_))));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        std::fs::write(&path, t.to_json().to_string()).unwrap();
        let back = TableEmbedder::load(&path).unwrap();
        assert_eq!(back.embed_batch(&["no effusion"]).unwrap(), vec![vec![1.0, 0.0]]);
    }

    #[test]
    fn spec_build_errors() {
        let spec = EmbeddingProviderSpec { kind: ProviderKind::RemoteHttp, ..Default::default() };
        assert!(matches!(spec.build(), Err(EmbedError::Config(_))));
        let spec = EmbeddingProviderSpec { dim: 4, ..Default::default() };
        assert!(spec.build().is_err());
    }
}
