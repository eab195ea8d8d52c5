//! Batch prompts for translation and self-check.
//!
//! Sentences are embedded in a prompt as an index-keyed JSON object, one
//! `"i": "text"` line per sentence, the same shape the model must answer in.

use std::collections::BTreeMap;

const TRANSLATE_TEMPLATE: &str = include_str!("../../data/prompts/translate.txt");
const REFINE_TEMPLATE: &str = include_str!("../../data/prompts/refine.txt");

const TRANSLATE_HEADER: &str = "Given a series of sentences";
const REFINE_HEADER: &str = "Given a series of Original sentences";
const TRANSLATE_BLOCK: &str = "\nSentences:\n";
const ORIGINALS_BLOCK: &str = "\nOriginal Sentences:\n";
const TRANSLATIONS_BLOCK: &str = "\nTranslated Layman's Term:\n";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PromptKind {
    Translate,
    Refine,
}

impl PromptKind {
    pub fn detect(prompt: &str) -> Option<Self> {
        let p = prompt.trim_start();
        if p.starts_with(REFINE_HEADER) {
            Some(Self::Refine)
        } else if p.starts_with(TRANSLATE_HEADER) {
            Some(Self::Translate)
        } else {
            None
        }
    }
}

pub fn render_sentence_block<S: AsRef<str>>(sentences: &[S]) -> String {
    let mut out = String::from("{\n");
    for (i, s) in sentences.iter().enumerate() {
        let sep = if i + 1 < sentences.len() { "," } else { "" };
        out.push_str(&format!(
            "\"{i}\": {}{sep}\n",
            serde_json::to_string(s.as_ref()).expect("string serializes")
        ));
    }
    out.push('}');
    out
}

pub fn render_translate_prompt<S: AsRef<str>>(sentences: &[S]) -> String {
    TRANSLATE_TEMPLATE.replace("{sentences}", &render_sentence_block(sentences))
}

pub fn render_refine_prompt<S: AsRef<str>, L: AsRef<str>>(originals: &[S], translations: &[L]) -> String {
    REFINE_TEMPLATE
        .replace("{originals}", &render_sentence_block(originals))
        .replace("{translations}", &render_sentence_block(translations))
}

/// Reads the sentence block that follows `header` in a rendered prompt.
fn block_after(prompt: &str, header: &str) -> Option<Vec<String>> {
    let start = prompt.find(header)? + header.len();
    let mut stream = serde_json::Deserializer::from_str(&prompt[start..]).into_iter::<BTreeMap<usize, String>>();
    let map = stream.next()?.ok()?;
    map.keys().copied().eq(0..map.len()).then(|| map.into_values().collect())
}

/// Recovers the sentence lists from a rendered prompt: one list for a
/// translation prompt, originals then translations for a self-check prompt.
pub fn parse_sentence_block(prompt: &str) -> Option<(PromptKind, Vec<Vec<String>>)> {
    match PromptKind::detect(prompt)? {
        PromptKind::Translate => Some((PromptKind::Translate, vec![block_after(prompt, TRANSLATE_BLOCK)?])),
        PromptKind::Refine => {
            let originals = block_after(prompt, ORIGINALS_BLOCK)?;
            let translations = block_after(prompt, TRANSLATIONS_BLOCK)?;
            Some((PromptKind::Refine, vec![originals, translations]))
        }
    }
}
