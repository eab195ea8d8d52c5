use std::collections::HashMap;

/// Multiset of the order-`n` n-grams of a token slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramCounts<'a> {
    pub n: usize,
    pub counts: HashMap<&'a [String], usize>,
}

impl<'a> NGramCounts<'a> {
    pub fn new(tokens: &'a [String], n: usize) -> Self {
        let mut counts = HashMap::new();
        if n > 0 && tokens.len() >= n {
            for gram in tokens.windows(n) {
                *counts.entry(gram).or_insert(0) += 1;
            }
        }
        Self { n, counts }
    }

    /// Total number of n-grams, `max(0, len - n + 1)`.
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// Overlap with counts clipped by `other`.
    pub fn clipped_overlap(&self, other: &NGramCounts<'_>) -> usize {
        self.counts
            .iter()
            .map(|(gram, &c)| c.min(other.counts.get(gram).copied().unwrap_or(0)))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn clipping() {
        let c = toks("the the the");
        let r = toks("the cat");
        assert_eq!(NGramCounts::new(&c, 1).clipped_overlap(&NGramCounts::new(&r, 1)), 1);
    }

    proptest! {
        #[test]
        fn total_matches_window_count(words in proptest::collection::vec("[a-c]", 0..12), n in 1usize..5) {
            let counts = NGramCounts::new(&words, n);
            prop_assert_eq!(counts.total(), (words.len() + 1).saturating_sub(n));
        }
    }
}
