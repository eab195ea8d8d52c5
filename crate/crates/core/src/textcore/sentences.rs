use std::collections::HashSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

const DEFAULT_ABBREVIATIONS: &str = include_str!("../../data/abbreviations.txt");

/// One segmented sentence with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_id: Option<String>,
    #[serde(default)]
    pub position: usize,
}

/// Rule-based sentence splitter.
///
/// A sentence ends at `.`, `!` or `?` (or a run of them) followed by
/// whitespace or end of input, unless the word carrying the period is a
/// listed abbreviation.
#[derive(Debug, Clone)]
pub struct Segmenter {
    abbreviations: HashSet<String>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Self::with_abbreviations(DEFAULT_ABBREVIATIONS.lines())
    }
}

impl Segmenter {
    /// Abbreviations are matched case-insensitively, without their final period
    /// (`"e.g"` protects `"e.g."`).
    pub fn with_abbreviations<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let abbreviations = abbreviations
            .into_iter()
            .map(|a| a.as_ref().trim().trim_end_matches('.').to_lowercase())
            .filter(|a| !a.is_empty())
            .collect();
        Self { abbreviations }
    }

    /// Adds more abbreviations to the protected set.
    pub fn extend<I, S>(&mut self, more: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.abbreviations.extend(
            more.into_iter()
                .map(|a| a.as_ref().trim().trim_end_matches('.').to_lowercase())
                .filter(|a| !a.is_empty()),
        );
    }

    pub fn is_abbreviation(&self, word: &str) -> bool {
        self.abbreviations.contains(&word.to_lowercase())
    }

    /// Sentence strings, trimmed, in order. Whitespace-only input yields nothing.
    pub fn split(&self, text: &str) -> Vec<String> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut out = Vec::new();
        let mut start = 0usize;
        let mut i = 0usize;

        while i < chars.len() {
            let (_, ch) = chars[i];
            if !is_terminal(ch) {
                i += 1;
                continue;
            }
            // absorb runs like "?!" or "..."
            let mut j = i;
            while j + 1 < chars.len() && is_terminal(chars[j + 1].1) {
                j += 1;
            }
            // closing quotes/brackets stay with the sentence
            while j + 1 < chars.len() && matches!(chars[j + 1].1, '"' | '\'' | ')' | ']' | '\u{201d}') {
                j += 1;
            }
            let end = chars.get(j + 1).map_or(text.len(), |&(b, _)| b);
            let at_boundary = chars.get(j + 1).is_none_or(|&(_, c)| c.is_whitespace());
            let protected = ch == '.' && i == j && self.protects(text, chars[i].0);

            if at_boundary && !protected {
                push_trimmed(&mut out, &text[start..end]);
                start = end;
            }
            i = j + 1;
        }
        push_trimmed(&mut out, &text[start..]);
        out
    }

    /// Segments a free-standing text; ids are the positions.
    pub fn split_records(&self, text: &str) -> Vec<SentenceRecord> {
        self.split(text)
            .into_iter()
            .enumerate()
            .map(|(position, text)| SentenceRecord {
                id: position.to_string(),
                text,
                report_id: None,
                position,
            })
            .collect()
    }

    /// Segments a report; ids are `"{report_id}-{position}"`.
    pub fn segment_report(&self, report_id: &str, text: &str) -> Vec<SentenceRecord> {
        self.split(text)
            .into_iter()
            .enumerate()
            .map(|(position, text)| SentenceRecord {
                id: format!("{report_id}-{position}"),
                text,
                report_id: Some(report_id.to_string()),
                position,
            })
            .collect()
    }

    fn protects(&self, text: &str, period_at: usize) -> bool {
        let before = &text[..period_at];
        let word_start = before
            .char_indices()
            .rev()
            .find(|&(_, c)| c.is_whitespace())
            .map_or(0, |(b, c)| b + c.len_utf8());
        let word = before[word_start..].trim_start_matches(|c: char| !c.is_alphanumeric());
        !word.is_empty() && self.is_abbreviation(word)
    }
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn push_trimmed(out: &mut Vec<String>, piece: &str) {
    let piece = piece.trim();
    if !piece.is_empty() {
        out.push(piece.to_string());
    }
}

fn default_segmenter() -> &'static Segmenter {
    static SEGMENTER: OnceLock<Segmenter> = OnceLock::new();
    SEGMENTER.get_or_init(Segmenter::default)
}

/// Splits with the default abbreviation list.
pub fn split_sentences(text: &str) -> Vec<SentenceRecord> {
    default_segmenter().split_records(text)
}

/// Segments a report with the default abbreviation list.
pub fn segment_report(report_id: &str, text: &str) -> Vec<SentenceRecord> {
    default_segmenter().segment_report(report_id, text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn texts(records: &[SentenceRecord]) -> Vec<&str> {
        records.iter().map(|r| r.text.as_str()).collect()
    }

    #[test]
    fn two_clear_terminals() {
        let s = split_sentences("No pneumonia. Heart size normal.");
        assert_eq!(texts(&s), ["No pneumonia.", "Heart size normal."]);
        assert_eq!(s[1].position, 1);
    }

    #[test]
    fn no_terminal_punctuation() {
        assert_eq!(texts(&split_sentences("No acute process")), ["No acute process"]);
    }

    #[test]
    fn configured_abbreviation_is_protected() {
        let mut seg = Segmenter::default();
        let text = "Impression: stable. Follow up in 3 mo. if needed.";
        assert_eq!(seg.split(text).len(), 3);
        seg.extend(["mo"]);
        assert_eq!(seg.split(text), ["Impression: stable.", "Follow up in 3 mo. if needed."]);
    }

    #[test]
    fn default_abbreviations() {
        let s = split_sentences("Seen by Dr. Smith today. Compare e.g. prior films.");
        assert_eq!(texts(&s), ["Seen by Dr. Smith today.", "Compare e.g. prior films."]);
    }

    #[test]
    fn decimals_and_runs() {
        let s = split_sentences("Nodule measures 3.5 cm! Really?! Yes...");
        assert_eq!(texts(&s), ["Nodule measures 3.5 cm!", "Really?!", "Yes..."]);
    }

    #[test]
    fn report_ids() {
        let s = segment_report("r7", "A. B.");
        assert_eq!(s[1].id, "r7-1");
        assert_eq!(s[1].report_id.as_deref(), Some("r7"));
    }

    #[test]
    fn whitespace_only() {
        assert!(split_sentences("   ").is_empty());
    }

    proptest! {
        #[test]
        fn reconstruction_keeps_every_visible_char(s in "[a-zA-Z .!?,]{0,80}") {
            let joined = split_sentences(&s).iter().map(|r| r.text.clone()).collect::<Vec<_>>().join(" ");
            let a: String = s.chars().filter(|c| !c.is_whitespace()).collect();
            let b: String = joined.chars().filter(|c| !c.is_whitespace()).collect();
            prop_assert_eq!(a, b);
        }
    }
}
