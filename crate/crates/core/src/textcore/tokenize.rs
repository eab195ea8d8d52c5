use serde::{Deserialize, Serialize};

/// Lowercased word tokens with their byte spans in the source text.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_span: Option<Vec<(usize, usize)>>,
}

impl TokenSequence {
    /// Builds a sequence from already-normalized tokens (no spans).
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            tokens: tokens.into_iter().map(Into::into).collect(),
            source_span: None,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn as_slice(&self) -> &[String] {
        &self.tokens
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }
}

/// Splits `text` into maximal runs of letters and digits, lowercased.
///
/// Every other character (punctuation, hyphens, apostrophes, whitespace) is a
/// boundary and is dropped, so `"x-ray"` yields `["x", "ray"]`.
pub fn tokenize(text: &str) -> TokenSequence {
    let mut tokens = Vec::new();
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let mut current = String::new();

    for (idx, ch) in text.char_indices() {
        if ch.is_alphanumeric() {
            if start.is_none() {
                start = Some(idx);
            }
            current.extend(ch.to_lowercase());
        } else if let Some(s) = start.take() {
            tokens.push(std::mem::take(&mut current));
            spans.push((s, idx));
        }
    }
    if let Some(s) = start {
        tokens.push(current);
        spans.push((s, text.len()));
    }

    TokenSequence {
        tokens,
        source_span: Some(spans),
    }
}
