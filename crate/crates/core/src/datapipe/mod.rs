//! Dataset construction: near-duplicate filtering, batched LLM translation,
//! and the translate / self-check / similarity-gate refinement loop.

mod build;
mod chat;
mod dedup;
mod llmjson;
mod prompts;
mod refine;
mod sample;
mod translate;

pub use build::{
    build_dataset, dataset_stats, load_corpus, validate_dataset, BuildConfig, BuildPaths, Checkpoint, CurvePoint,
    DatasetStats, DedupStats, Level, RunStats,
};
pub use chat::{
    ChatError, ChatProvider, ChatProviderKind, ChatProviderSpec, Glossary, MockGlossaryChat, RemoteChat,
};
pub use dedup::{deduplicate, DedupResult};
pub use llmjson::{parse_llm_json, LlmJsonError};
pub use prompts::{parse_sentence_block, render_refine_prompt, render_sentence_block, render_translate_prompt, PromptKind};
pub use refine::{refine, refine_batch, RefineOptions, RefineOutcome, RoundStats};
pub use sample::sample_export;
pub use translate::{self_check, self_check_batch, translate_batch, Verdict};

use serde::{Deserialize, Serialize};

use crate::embedkit::EmbedError;
use crate::jsonl::JsonlError;

pub const DEFAULT_THRESHOLD: f64 = 0.8;
pub const DEFAULT_MAX_ITERATIONS: usize = 3;
pub const DEFAULT_BATCH_SIZE: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairStatus {
    Accepted,
    Flagged,
    Pending,
}

/// One professional/layman record of the output dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaymanPair {
    pub id: String,
    pub professional: String,
    pub layman: String,
    pub similarity: f64,
    pub status: PairStatus,
    pub iterations: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Chat(#[from] ChatError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("unparseable response: {0}")]
    UnparseableResponse(String),
    #[error("incomplete batch: missing indices {0:?}")]
    IncompleteBatch(Vec<usize>),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("round {round}: {source}")]
    Round {
        round: usize,
        #[source]
        source: Box<PipelineError>,
    },
    #[error(transparent)]
    Data(#[from] JsonlError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("checkpoint does not match this run: {0}")]
    CheckpointMismatch(String),
}

impl PipelineError {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io {
            context: context.into(),
            source,
        }
    }

    /// True for failures of an external provider (as opposed to bad input).
    pub fn is_provider_failure(&self) -> bool {
        match self {
            Self::Chat(_) | Self::Embed(_) | Self::UnparseableResponse(_) | Self::IncompleteBatch(_) => true,
            Self::Round { source, .. } => source.is_provider_failure(),
            _ => false,
        }
    }
}
