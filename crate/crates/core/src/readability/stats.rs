use serde::{Deserialize, Serialize};

use super::WordList;
use crate::textcore::{tokenize, Segmenter, SyllableCounter};

/// Raw counts every readability formula is built from.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TextStats {
    pub sentences: usize,
    pub words: usize,
    pub syllables: usize,
    pub letters: usize,
    /// words of three or more syllables
    pub complex_words: usize,
    pub polysyllables: usize,
    pub monosyllables: usize,
    pub difficult_words_dc: usize,
    pub unfamiliar_words_spache: usize,
    /// words of at most three letters
    pub miniwords: usize,
}

/// Computes [`TextStats`] with a given segmenter, syllable table and word lists.
#[derive(Debug, Clone)]
pub struct TextAnalyzer<'a> {
    pub segmenter: Segmenter,
    pub syllables: &'a SyllableCounter,
    pub dale_chall: &'a WordList,
    pub spache: &'a WordList,
}

impl Default for TextAnalyzer<'static> {
    fn default() -> Self {
        Self {
            segmenter: Segmenter::default(),
            syllables: SyllableCounter::bundled(),
            dale_chall: WordList::dale_chall(),
            spache: WordList::spache(),
        }
    }
}

impl TextAnalyzer<'_> {
    /// Words are tokens with at least one letter; purely numeric tokens are
    /// skipped. Letters count alphabetic characters only.
    pub fn stats(&self, text: &str) -> TextStats {
        let mut st = TextStats::default();
        let mut sentences_with_words = 0;
        for sentence in self.segmenter.split(text) {
            let mut has_word = false;
            for token in tokenize(&sentence).tokens {
                let Ok(syl) = self.syllables.count(&token) else {
                    continue;
                };
                has_word = true;
                let letters = token.chars().filter(|c| c.is_alphabetic()).count();
                st.words += 1;
                st.syllables += syl;
                st.letters += letters;
                if syl >= 3 {
                    st.complex_words += 1;
                }
                if syl == 1 {
                    st.monosyllables += 1;
                }
                if letters <= 3 {
                    st.miniwords += 1;
                }
                if !self.dale_chall.contains(&token) {
                    st.difficult_words_dc += 1;
                }
                if !self.spache.contains(&token) {
                    st.unfamiliar_words_spache += 1;
                }
            }
            if has_word {
                sentences_with_words += 1;
            }
        }
        st.sentences = sentences_with_words;
        st.polysyllables = st.complex_words;
        st
    }
}

/// Statistics with the bundled data files.
pub fn text_stats(text: &str) -> TextStats {
    TextAnalyzer::default().stats(text)
}
