use std::collections::HashMap;
use std::sync::OnceLock;

const DEFAULT_OVERRIDES: &str = include_str!("../../data/syllable_overrides.tsv");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyllableError {
    #[error("not a word: {0:?}")]
    NotAWord(String),
    #[error("syllable overrides line {line}: {reason}")]
    BadOverride { line: usize, reason: String },
}

/// Vowel-group syllable counter with an exceptions table.
#[derive(Debug, Clone, Default)]
pub struct SyllableCounter {
    overrides: HashMap<String, usize>,
}

impl SyllableCounter {
    /// Parses `word<TAB>count` lines. Blank lines and `#` comments are skipped.
    pub fn from_overrides(table: &str) -> Result<Self, SyllableError> {
        let mut overrides = HashMap::new();
        for (idx, line) in table.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: &str| SyllableError::BadOverride {
                line: idx + 1,
                reason: reason.to_string(),
            };
            let (word, count) = line.split_once('\t').ok_or_else(|| bad("expected word<TAB>count"))?;
            let count: usize = count.trim().parse().map_err(|_| bad("count is not an integer"))?;
            if count == 0 {
                return Err(bad("count must be positive"));
            }
            overrides.insert(word.trim().to_lowercase(), count);
        }
        Ok(Self { overrides })
    }

    pub fn bundled() -> &'static SyllableCounter {
        static COUNTER: OnceLock<SyllableCounter> = OnceLock::new();
        COUNTER.get_or_init(|| Self::from_overrides(DEFAULT_OVERRIDES).expect("bundled overrides parse"))
    }

    pub fn count(&self, word: &str) -> Result<usize, SyllableError> {
        let letters: String = word
            .chars()
            .filter(|c| c.is_alphabetic())
            .flat_map(char::to_lowercase)
            .collect();
        if letters.is_empty() {
            return Err(SyllableError::NotAWord(word.to_string()));
        }
        if let Some(&n) = self.overrides.get(&letters) {
            return Ok(n);
        }
        Ok(heuristic(&letters))
    }
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

fn heuristic(word: &str) -> usize {
    let chars: Vec<char> = word.chars().collect();
    let mut groups = 0usize;
    let mut in_group = false;
    for &c in &chars {
        let v = is_vowel(c);
        if v && !in_group {
            groups += 1;
        }
        in_group = v;
    }
    // silent final e: a lone 'e' after a consonant
    let n = chars.len();
    if n >= 2 && chars[n - 1] == 'e' && !is_vowel(chars[n - 2]) && groups > 1 {
        groups -= 1;
    }
    groups.max(1)
}

/// Counts syllables with the bundled exceptions table.
pub fn count_syllables(word: &str) -> Result<usize, SyllableError> {
    SyllableCounter::bundled().count(word)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_words() {
        assert_eq!(count_syllables("cat").unwrap(), 1);
        assert_eq!(count_syllables("hello").unwrap(), 2);
        assert_eq!(count_syllables("ate").unwrap(), 1);
        assert_eq!(count_syllables("the").unwrap(), 1);
        assert_eq!(count_syllables("Pneumothorax").unwrap(), 4);
        assert_eq!(count_syllables("resolved").unwrap(), 3);
    }

    #[test]
    fn overrides_win() {
        assert_eq!(count_syllables("people").unwrap(), 2);
        let custom = SyllableCounter::from_overrides("cat\t7\n").unwrap();
        assert_eq!(custom.count("CAT").unwrap(), 7);
    }

    #[test]
    fn no_letters_is_an_error() {
        assert_eq!(count_syllables("42"), Err(SyllableError::NotAWord("42".into())));
        assert!(count_syllables("").is_err());
    }

    #[test]
    fn malformed_override_reports_line() {
        let err = SyllableCounter::from_overrides("a\t1\nb 2\n").unwrap_err();
        assert!(matches!(err, SyllableError::BadOverride { line: 2, .. }));
    }

    #[test]
    fn always_positive() {
        for w in ["e", "rhythm", "shh", "queue", "bee"] {
            assert!(count_syllables(w).unwrap() >= 1, "{w}");
        }
    }
}
