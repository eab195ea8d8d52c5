//! Deterministic text primitives shared by every metric: tokenization,
//! sentence segmentation, syllable counting and stemming.
//!
//! Everything here is a pure function of its input plus the bundled data
//! files under `data/`, so results are identical across runs and platforms.

mod sentences;
mod stem;
mod syllables;
mod tokenize;

pub use sentences::{segment_report, split_sentences, SentenceRecord, Segmenter};
pub use stem::stem;
pub use syllables::{count_syllables, SyllableCounter, SyllableError};
pub use tokenize::{tokenize, TokenSequence};
