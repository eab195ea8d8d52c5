//! Semantics-based report evaluation: nearest-layman substitution followed
//! by thresholded sentence matching and lexical scoring.

mod evaluate;
mod index;
mod matching;
mod substitute;

pub use evaluate::{evaluate_corpus, evaluate_report, AggregateReport, CorpusReport, MetricReport, ReportRecord};
pub use index::LaymanIndex;
pub use matching::{match_proportion, MatchResult, MatchedPair};
pub use substitute::{substitute_layman, Substitution};

use serde::{Deserialize, Serialize};

use crate::embedkit::EmbedError;
use crate::jsonl::JsonlError;
use crate::lexmetrics::LexError;

#[derive(Debug, thiserror::Error)]
pub enum SemevalError {
    #[error("empty report")]
    EmptyReport,
    #[error("empty layman index")]
    EmptyIndex,
    #[error("substitution requested but no layman index was given")]
    NoIndex,
    #[error("no report ids in common")]
    EmptyCorpus,
    #[error("unmatched ids: candidates without reference {missing_reference:?}, references without candidate {missing_candidate:?}")]
    IdMismatch {
        missing_reference: Vec<String>,
        missing_candidate: Vec<String>,
    },
    #[error("invalid threshold {0}: must lie in (0, 1]")]
    BadThreshold(f64),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Data(#[from] JsonlError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub theta: f64,
    pub substitution: bool,
    /// Below this best similarity a sentence keeps its original text.
    pub substitution_floor: Option<f64>,
    /// Record each matched sentence's best counterpart instead of its first.
    pub best_match: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            theta: 0.8,
            substitution: true,
            substitution_floor: None,
            best_match: false,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), SemevalError> {
        if self.theta > 0.0 && self.theta <= 1.0 {
            Ok(())
        } else {
            Err(SemevalError::BadThreshold(self.theta))
        }
    }
}
