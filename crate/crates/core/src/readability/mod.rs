//! Readability measures: Flesch Reading Ease ("Easy") plus nine grade-level
//! formulas (M1..M9).
//!
//! | field | measure | formula |
//! |-------|---------|---------|
//! | easy | Flesch Reading Ease | 206.835 − 1.015·ASL − 84.6·ASW |
//! | m1 | Flesch–Kincaid grade | 0.39·ASL + 11.8·ASW − 15.59 |
//! | m2 | Gunning FOG | 0.4·(ASL + 100·complex/words) |
//! | m3 | SMOG | 1.0430·√(poly·30/sentences) + 3.1291 |
//! | m4 | ARI | 4.71·letters/words + 0.5·ASL − 21.43 |
//! | m5 | Coleman–Liau | 0.0588·L − 0.296·S − 15.8 (per 100 words) |
//! | m6 | Linsear Write | r = (easy + 3·hard)/sentences; r/2 if r > 20 else (r − 2)/2 |
//! | m7 | Dale–Chall | 0.1579·PDW + 0.0496·ASL (+3.6365 when PDW > 5) |
//! | m8 | Spache (revised) | 0.121·ASL + 0.082·PUW + 0.659 |
//! | m9 | McAlpine EFLAW | (words + miniwords)/sentences |
//!
//! ASL is words per sentence, ASW syllables per word, PDW/PUW the percentage
//! of words missing from the Dale–Chall/Spache lists. Scores are unrounded.

mod stats;
mod wordlist;

use serde::{Deserialize, Serialize};

pub use stats::{text_stats, TextAnalyzer, TextStats};
pub use wordlist::WordList;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReadabilityError {
    #[error("insufficient text: need at least one word and one sentence")]
    InsufficientText,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadabilityReport<T> {
    pub easy: T,
    pub m1: T,
    pub m2: T,
    pub m3: T,
    pub m4: T,
    pub m5: T,
    pub m6: T,
    pub m7: T,
    pub m8: T,
    pub m9: T,
}

impl<T: Real> ReadabilityReport<T> {
    /// All ten scores rounded to the nearest integer, for table display.
    pub fn rounded(&self) -> Self {
        let r = |v: T| v.round();
        Self {
            easy: r(self.easy),
            m1: r(self.m1),
            m2: r(self.m2),
            m3: r(self.m3),
            m4: r(self.m4),
            m5: r(self.m5),
            m6: r(self.m6),
            m7: r(self.m7),
            m8: r(self.m8),
            m9: r(self.m9),
        }
    }

    pub fn mean(reports: &[Self]) -> Option<Self> {
        if reports.is_empty() {
            return None;
        }
        let n = T::from_count(reports.len());
        let avg = |f: fn(&Self) -> T| reports.iter().map(f).sum::<T>() / n;
        Some(Self {
            easy: avg(|r| r.easy),
            m1: avg(|r| r.m1),
            m2: avg(|r| r.m2),
            m3: avg(|r| r.m3),
            m4: avg(|r| r.m4),
            m5: avg(|r| r.m5),
            m6: avg(|r| r.m6),
            m7: avg(|r| r.m7),
            m8: avg(|r| r.m8),
            m9: avg(|r| r.m9),
        })
    }
}

/// Applies every formula to `stats`.
pub fn readability_suite<T: Real>(stats: &TextStats) -> Result<ReadabilityReport<T>, ReadabilityError> {
    if stats.words == 0 || stats.sentences == 0 {
        return Err(ReadabilityError::InsufficientText);
    }
    let c = T::from_count;
    let l = T::lit;
    let words = c(stats.words);
    let sentences = c(stats.sentences);
    let asl = words / sentences;
    let asw = c(stats.syllables) / words;
    let hundred = l(100.0);

    let easy = l(206.835) - l(1.015) * asl - l(84.6) * asw;
    let m1 = l(0.39) * asl + l(11.8) * asw - l(15.59);
    let m2 = l(0.4) * (asl + hundred * c(stats.complex_words) / words);
    let m3 = l(1.0430) * (c(stats.polysyllables) * l(30.0) / sentences).sqrt() + l(3.1291);
    let m4 = l(4.71) * c(stats.letters) / words + l(0.5) * asl - l(21.43);
    let letters_per_100 = c(stats.letters) / words * hundred;
    let sentences_per_100 = sentences / words * hundred;
    let m5 = l(0.0588) * letters_per_100 - l(0.296) * sentences_per_100 - l(15.8);

    let hard = c(stats.complex_words);
    let easy_words = words - hard;
    let r = (easy_words + l(3.0) * hard) / sentences;
    let m6 = if r > l(20.0) { r / l(2.0) } else { (r - l(2.0)) / l(2.0) };

    let pdw = hundred * c(stats.difficult_words_dc) / words;
    let mut m7 = l(0.1579) * pdw + l(0.0496) * asl;
    if pdw > l(5.0) {
        m7 = m7 + l(3.6365);
    }
    let puw = hundred * c(stats.unfamiliar_words_spache) / words;
    let m8 = l(0.121) * asl + l(0.082) * puw + l(0.659);
    let m9 = (words + c(stats.miniwords)) / sentences;

    Ok(ReadabilityReport { easy, m1, m2, m3, m4, m5, m6, m7, m8, m9 })
}
