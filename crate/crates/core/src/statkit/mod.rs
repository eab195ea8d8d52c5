//! Correlation with human scores, inter-annotator agreement, similarity
//! histograms and pairwise-cosine diversity.

mod correlation;
mod diversity;
mod histogram;
mod kappa;

pub use correlation::{pearson, ranks, spearman, PairedSeries};
pub use diversity::{diversity, diversity_of_vectors, Diversity};
pub use histogram::{similarity_histogram, Histogram};
pub use kappa::{cohens_kappa, uniform_bins};

use crate::embedkit::EmbedError;

#[derive(Debug, thiserror::Error)]
pub enum StatError {
    #[error("need at least {need} observations, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("degenerate series")]
    Degenerate,
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("empty input")]
    Empty,
    #[error("bin count must be at least 1")]
    BadBins,
    #[error("value {0} outside histogram range")]
    OutOfRange(f64),
    #[error("chance agreement is 1; kappa undefined")]
    DegenerateAgreement,
    #[error(transparent)]
    Embed(#[from] EmbedError),
}
