//! Layman-style radiology report toolkit: dataset construction through a
//! translate/self-check/similarity loop, and semantics-based evaluation that
//! substitutes sentences with their nearest layman equivalents before
//! matching.
//!
//! Numeric code in [`lexmetrics`], [`readability`] and [`statkit`] is generic
//! over [`scalar::Real`] (`f32` or `f64`); the aliases below fix the common
//! choice.

pub mod datapipe;
pub mod embedkit;
pub mod http;
pub mod jsonl;
pub mod lexmetrics;
pub mod readability;
pub mod scalar;
pub mod semeval;
pub mod statkit;
pub mod textcore;

pub use scalar::Real;

pub type Prf64 = lexmetrics::Prf<f64>;
pub type Prf32 = lexmetrics::Prf<f32>;
pub type LexicalScores64 = lexmetrics::LexicalScores<f64>;
pub type LexicalScores32 = lexmetrics::LexicalScores<f32>;
pub type ReadabilityReport64 = readability::ReadabilityReport<f64>;
pub type ReadabilityReport32 = readability::ReadabilityReport<f32>;
pub type Histogram64 = statkit::Histogram<f64>;
pub type Histogram32 = statkit::Histogram<f32>;
pub type PairedSeries64 = statkit::PairedSeries<f64>;
