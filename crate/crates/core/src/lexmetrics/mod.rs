//! Lexical overlap metrics over token sequences: BLEU-1..4, ROUGE-1/2/L and
//! a stem-matching METEOR variant.
//!
//! All scorers are generic over the output scalar (`f32`/`f64`). Inputs are
//! [`TokenSequence`]s produced by [`crate::textcore::tokenize`].

mod bleu;
mod meteor;
mod ngram;
mod rouge;

use serde::{Deserialize, Serialize};

pub use bleu::{bleu, corpus_bleu, BleuOptions};
pub use meteor::{meteor_lite, MeteorAlignment};
pub use ngram::NGramCounts;
pub use rouge::{lcs_len, rouge_l, rouge_n};

use crate::scalar::Real;
use crate::textcore::TokenSequence;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexError {
    #[error("empty reference")]
    EmptyReference,
    #[error("n-gram order {0} out of range")]
    BadOrder(usize),
}

/// Precision, recall and their harmonic mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf<T> {
    pub precision: T,
    pub recall: T,
    pub f1: T,
}

impl<T: Real> Prf<T> {
    pub fn new(precision: T, recall: T) -> Self {
        Self {
            precision,
            recall,
            f1: harmonic_mean(precision, recall),
        }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }
}

/// `2pr / (p + r)`, or zero when both are zero.
pub fn harmonic_mean<T: Real>(p: T, r: T) -> T {
    let sum = p + r;
    if sum <= T::zero() {
        T::zero()
    } else {
        T::lit(2.0) * p * r / sum
    }
}

/// Every lexical score for one candidate/reference pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LexicalScores<T> {
    pub bleu1: T,
    pub bleu2: T,
    pub bleu3: T,
    pub bleu4: T,
    pub rouge1: T,
    pub rouge2: T,
    #[serde(rename = "rougeL")]
    pub rouge_l: T,
    pub meteor: T,
}

impl<T: Real> LexicalScores<T> {
    /// Scores a pair with sentence-level settings (BLEU smoothing on, ROUGE F1).
    pub fn compute(candidate: &TokenSequence, reference: &TokenSequence) -> Result<Self, LexError> {
        let opts = |max_n| BleuOptions { max_n, smoothing: true };
        Ok(Self {
            bleu1: bleu(candidate, reference, opts(1))?,
            bleu2: bleu(candidate, reference, opts(2))?,
            bleu3: bleu(candidate, reference, opts(3))?,
            bleu4: bleu(candidate, reference, opts(4))?,
            rouge1: rouge_n::<T>(candidate, reference, 1)?.f1,
            rouge2: rouge_n::<T>(candidate, reference, 2)?.f1,
            rouge_l: rouge_l::<T>(candidate, reference)?.f1,
            meteor: meteor_lite(candidate, reference)?,
        })
    }

    /// Arithmetic mean over pairs; `None` for an empty slice.
    pub fn mean(items: &[Self]) -> Option<Self> {
        if items.is_empty() {
            return None;
        }
        let n = T::from_count(items.len());
        let avg = |f: fn(&Self) -> T| items.iter().map(f).sum::<T>() / n;
        Some(Self {
            bleu1: avg(|s| s.bleu1),
            bleu2: avg(|s| s.bleu2),
            bleu3: avg(|s| s.bleu3),
            bleu4: avg(|s| s.bleu4),
            rouge1: avg(|s| s.rouge1),
            rouge2: avg(|s| s.rouge2),
            rouge_l: avg(|s| s.rouge_l),
            meteor: avg(|s| s.meteor),
        })
    }
}
