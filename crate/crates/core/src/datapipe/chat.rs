use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::prompts::{parse_sentence_block, render_sentence_block, PromptKind};
use crate::http::{Backoff, HttpTransport, TransportError, UreqTransport};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChatError {
    #[error("chat provider unavailable after {attempts} attempts: {reason}")]
    Unavailable { attempts: u32, reason: String },
    #[error("malformed chat response: {0}")]
    BadResponse(String),
    #[error("invalid chat provider configuration: {0}")]
    Config(String),
    #[error("chat request failed: {0}")]
    Failed(String),
}

/// A text-in, text-out LLM endpoint.
pub trait ChatProvider: Send + Sync {
    fn id(&self) -> &str;
    fn complete(&self, prompt: &str) -> Result<String, ChatError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ChatProviderKind {
    #[default]
    MockGlossary,
    RemoteHttp,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ChatProviderSpec {
    pub provider_id: Option<String>,
    pub kind: ChatProviderKind,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub api_key: Option<String>,
    /// Mock only: TSV of `professional<TAB>layman` phrase substitutions.
    pub glossary_path: Option<PathBuf>,
    /// Mock only: TSV of `layman<TAB>revised` self-check corrections.
    pub fix_table_path: Option<PathBuf>,
}

impl ChatProviderSpec {
    pub fn build(&self) -> Result<Arc<dyn ChatProvider>, ChatError> {
        match self.kind {
            ChatProviderKind::MockGlossary => {
                let glossary = match &self.glossary_path {
                    Some(p) => Glossary::load(p)?,
                    None => Glossary::default(),
                };
                let fixes = match &self.fix_table_path {
                    Some(p) => load_pairs(p)?.into_iter().collect(),
                    None => HashMap::new(),
                };
                let mut mock = MockGlossaryChat::new(glossary, fixes);
                if let Some(id) = &self.provider_id {
                    mock.id = id.clone();
                }
                Ok(Arc::new(mock))
            }
            ChatProviderKind::RemoteHttp => {
                let endpoint = self
                    .endpoint
                    .clone()
                    .ok_or_else(|| ChatError::Config("remote chat provider needs an endpoint URL".into()))?;
                Ok(Arc::new(RemoteChat::new(
                    self,
                    endpoint,
                    Arc::new(UreqTransport::default()),
                    Backoff::default(),
                )))
            }
        }
    }
}

/// Chat-completions client: POST `{model, messages, temperature: 0}`, read
/// `choices[0].message.content`.
pub struct RemoteChat {
    id: String,
    endpoint: String,
    model: String,
    api_key: Option<String>,
    transport: Arc<dyn HttpTransport>,
    backoff: Backoff,
}

impl RemoteChat {
    pub fn new(spec: &ChatProviderSpec, endpoint: String, transport: Arc<dyn HttpTransport>, backoff: Backoff) -> Self {
        let model = spec.model.clone().unwrap_or_else(|| "default".to_string());
        Self {
            id: spec.provider_id.clone().unwrap_or_else(|| format!("remote-chat:{model}")),
            endpoint,
            model,
            api_key: spec.api_key.clone(),
            transport,
            backoff,
        }
    }
}

impl ChatProvider for RemoteChat {
    fn id(&self) -> &str {
        &self.id
    }

    fn complete(&self, prompt: &str) -> Result<String, ChatError> {
        let body = json!({
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        });
        let resp = self
            .backoff
            .retry(|| self.transport.post_json(&self.endpoint, self.api_key.as_deref(), &body))
            .map_err(|(e, attempts)| match e {
                TransportError::Retryable(reason) => ChatError::Unavailable { attempts, reason },
                TransportError::Fatal(reason) => ChatError::Failed(reason),
            })?;
        resp.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| ChatError::BadResponse("missing choices[0].message.content".into()))
    }
}

fn load_pairs(path: &Path) -> Result<Vec<(String, String)>, ChatError> {
    let text = std::fs::read_to_string(path).map_err(|e| ChatError::Config(format!("{}: {e}", path.display())))?;
    parse_pairs(&text).map_err(|e| ChatError::Config(format!("{}: {e}", path.display())))
}

/// Two-column TSV; blank lines and `#` comments are skipped.
fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (a, b) = line
            .split_once('\t')
            .ok_or_else(|| format!("line {}: expected two tab-separated columns", i + 1))?;
        out.push((a.trim().to_string(), b.trim().to_string()));
    }
    Ok(out)
}

fn fold(c: char) -> char {
    c.to_lowercase().next().unwrap_or(c)
}

/// Phrase substitution table applied longest-match-first, left to right,
/// case-insensitively, at word boundaries.
#[derive(Debug, Clone, Default)]
pub struct Glossary {
    // sorted longest first
    entries: Vec<(Vec<char>, String)>,
}

impl Glossary {
    pub fn new<I, A, B>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: Into<String>,
    {
        let mut entries: Vec<(Vec<char>, String)> = pairs
            .into_iter()
            .map(|(p, l)| (p.as_ref().chars().map(fold).collect::<Vec<_>>(), l.into()))
            .filter(|(p, _)| !p.is_empty())
            .collect();
        entries.sort_by_key(|e| std::cmp::Reverse(e.0.len()));
        Self { entries }
    }

    pub fn parse(tsv: &str) -> Result<Self, ChatError> {
        parse_pairs(tsv).map(Self::new).map_err(ChatError::Config)
    }

    pub fn load(path: &Path) -> Result<Self, ChatError> {
        load_pairs(path).map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn apply(&self, text: &str) -> String {
        let chars: Vec<char> = text.chars().collect();
        let folded: Vec<char> = chars.iter().map(|&c| fold(c)).collect();
        let mut out = String::with_capacity(text.len());
        let mut i = 0;
        while i < chars.len() {
            let at_word_start = i == 0 || !chars[i - 1].is_alphanumeric();
            let hit = at_word_start
                .then(|| {
                    self.entries.iter().find(|(pat, _)| {
                        let end = i + pat.len();
                        end <= chars.len()
                            && folded[i..end] == pat[..]
                            && (end == chars.len() || !chars[end].is_alphanumeric())
                    })
                })
                .flatten();
            match hit {
                Some((pat, layman)) => {
                    let mut rep = layman.chars();
                    if let Some(first) = rep.next() {
                        if chars[i].is_uppercase() {
                            out.extend(first.to_uppercase());
                        } else {
                            out.push(first);
                        }
                        out.extend(rep);
                    }
                    i += pat.len();
                }
                None => {
                    out.push(chars[i]);
                    i += 1;
                }
            }
        }
        out
    }
}

/// Deterministic offline stand-in for an LLM.
///
/// Translation prompts are answered by applying the glossary to each
/// sentence. Self-check prompts answer each translation with its fix-table
/// entry when one exists and echo it unchanged otherwise.
#[derive(Debug, Clone)]
pub struct MockGlossaryChat {
    id: String,
    glossary: Glossary,
    fixes: HashMap<String, String>,
}

impl MockGlossaryChat {
    pub fn new(glossary: Glossary, fixes: HashMap<String, String>) -> Self {
        Self {
            id: "mock-glossary".to_string(),
            glossary,
            fixes,
        }
    }

    /// Empty glossary and fix table: translation and self-check both echo.
    pub fn echo() -> Self {
        Self::new(Glossary::default(), HashMap::new())
    }
}

impl ChatProvider for MockGlossaryChat {
    fn id(&self) -> &str {
        &self.id
    }

    fn complete(&self, prompt: &str) -> Result<String, ChatError> {
        let (kind, blocks) =
            parse_sentence_block(prompt).ok_or_else(|| ChatError::Failed("mock cannot read prompt".into()))?;
        let answers: Vec<String> = match kind {
            PromptKind::Translate => blocks[0].iter().map(|s| self.glossary.apply(s)).collect(),
            PromptKind::Refine => blocks[1]
                .iter()
                .map(|t| self.fixes.get(t.trim()).cloned().unwrap_or_else(|| t.clone()))
                .collect(),
        };
        Ok(format!("```json\n{}\n```", render_sentence_block(&answers)))
    }
}
