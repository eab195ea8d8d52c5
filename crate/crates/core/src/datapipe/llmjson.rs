//! Extraction of the index-keyed JSON object an LLM is asked to return.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::de::{Deserializer, MapAccess, Visitor};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LlmJsonError {
    #[error("no JSON object found")]
    NoObject,
    #[error("duplicate key {0:?}")]
    DuplicateKey(String),
    #[error("key {0:?} is not a non-negative integer")]
    BadKey(String),
    #[error("value for key {0:?} is not a string")]
    NonStringValue(String),
}

struct Entries;

impl<'de> Visitor<'de> for Entries {
    type Value = Vec<(String, Value)>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a JSON object")
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
        let mut out = Vec::new();
        while let Some(entry) = map.next_entry::<String, Value>()? {
            out.push(entry);
        }
        Ok(out)
    }
}

/// Parses the first JSON object in `raw` into `index -> text`.
///
/// Markdown fences and surrounding prose are skipped: every `{` is tried in
/// turn until one starts a syntactically valid object.
pub fn parse_llm_json(raw: &str) -> Result<BTreeMap<usize, String>, LlmJsonError> {
    let entries = raw
        .match_indices('{')
        .find_map(|(i, _)| {
            let mut de = serde_json::Deserializer::from_str(&raw[i..]);
            de.deserialize_map(Entries).ok()
        })
        .ok_or(LlmJsonError::NoObject)?;

    let mut seen = HashSet::new();
    let mut out = BTreeMap::new();
    for (key, value) in entries {
        if !seen.insert(key.clone()) {
            return Err(LlmJsonError::DuplicateKey(key));
        }
        let idx: usize = key.trim().parse().map_err(|_| LlmJsonError::BadKey(key.clone()))?;
        let Value::String(text) = value else {
            return Err(LlmJsonError::NonStringValue(key));
        };
        out.insert(idx, text);
    }
    Ok(out)
}
