use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{match_proportion, substitute_layman, EvalConfig, LaymanIndex, MatchedPair, SemevalError};
use crate::embedkit::{EmbeddingCache, EmbeddingProvider};
use crate::lexmetrics::LexicalScores;
use crate::textcore::{split_sentences, tokenize};

/// `{id, text}` line of a candidate or reference file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(flatten)]
    pub lexical: LexicalScores<f64>,
    pub semantic_precision: f64,
    pub semantic_recall: f64,
    pub semantic_f1: f64,
    pub matched_pairs: Vec<MatchedPair>,
    /// Per candidate sentence, its highest similarity to any reference sentence.
    pub best_similarities: Vec<f64>,
    /// Sentences left unsubstituted because they fell below the floor.
    pub below_floor: usize,
    /// The texts actually scored (after substitution when enabled).
    pub candidate_text: String,
    pub reference_text: String,
}

fn sentences(text: &str) -> Result<Vec<String>, SemevalError> {
    let out: Vec<String> = split_sentences(text).into_iter().map(|s| s.text).collect();
    if out.is_empty() {
        return Err(SemevalError::EmptyReport);
    }
    Ok(out)
}

/// Scores one candidate report against one reference report.
pub fn evaluate_report(
    candidate: &str,
    reference: &str,
    index: Option<&LaymanIndex>,
    config: &EvalConfig,
    provider: &dyn EmbeddingProvider,
    cache: &EmbeddingCache,
) -> Result<MetricReport, SemevalError> {
    config.validate()?;
    let mut cand = sentences(candidate)?;
    let mut refs = sentences(reference)?;
    let mut below_floor = 0;
    if config.substitution {
        let index = index.ok_or(SemevalError::NoIndex)?;
        for side in [&mut cand, &mut refs] {
            let subs = substitute_layman(side, index, config.substitution_floor, provider, cache)?;
            below_floor += subs.iter().filter(|s| s.below_floor).count();
            *side = subs.into_iter().map(|s| s.text).collect();
        }
    }
    let m = match_proportion(&cand, &refs, config.theta, config.best_match, provider, cache)?;
    let candidate_text = cand.join(" ");
    let reference_text = refs.join(" ");
    let lexical = LexicalScores::compute(&tokenize(&candidate_text), &tokenize(&reference_text))?;
    Ok(MetricReport {
        id: None,
        lexical,
        semantic_precision: m.precision,
        semantic_recall: m.recall,
        semantic_f1: m.f1,
        matched_pairs: m.matched_pairs,
        best_similarities: m.candidate_best,
        below_floor,
        candidate_text,
        reference_text,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub count: usize,
    #[serde(flatten)]
    pub lexical: LexicalScores<f64>,
    pub semantic_precision: f64,
    pub semantic_recall: f64,
    pub semantic_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub reports: Vec<MetricReport>,
    pub aggregate: AggregateReport,
    /// Similarities of every recorded matched pair.
    pub matched_similarities: Vec<f64>,
    /// Best similarity of every candidate sentence.
    pub best_similarities: Vec<f64>,
}

/// Evaluates every candidate against the reference with the same id, in
/// candidate order, and averages the per-report scores.
pub fn evaluate_corpus(
    candidates: &[ReportRecord],
    references: &[ReportRecord],
    index: Option<&LaymanIndex>,
    config: &EvalConfig,
    provider: &dyn EmbeddingProvider,
    cache: &EmbeddingCache,
) -> Result<CorpusReport, SemevalError> {
    config.validate()?;
    let refs: HashMap<&str, &str> = references.iter().map(|r| (r.id.as_str(), r.text.as_str())).collect();
    let cand_ids: HashSet<&str> = candidates.iter().map(|c| c.id.as_str()).collect();
    let missing_reference: Vec<String> =
        candidates.iter().filter(|c| !refs.contains_key(c.id.as_str())).map(|c| c.id.clone()).collect();
    let missing_candidate: Vec<String> =
        references.iter().filter(|r| !cand_ids.contains(r.id.as_str())).map(|r| r.id.clone()).collect();
    if missing_reference.len() == candidates.len() {
        return Err(SemevalError::EmptyCorpus);
    }
    if !missing_reference.is_empty() || !missing_candidate.is_empty() {
        return Err(SemevalError::IdMismatch {
            missing_reference,
            missing_candidate,
        });
    }

    let reports: Vec<MetricReport> = candidates
        .par_iter()
        .map(|c| {
            let mut r = evaluate_report(&c.text, refs[c.id.as_str()], index, config, provider, cache)?;
            r.id = Some(c.id.clone());
            Ok(r)
        })
        .collect::<Result<_, SemevalError>>()?;

    let n = reports.len() as f64;
    let mean = |f: fn(&MetricReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    let lexical: Vec<LexicalScores<f64>> = reports.iter().map(|r| r.lexical).collect();
    let aggregate = AggregateReport {
        count: reports.len(),
        lexical: LexicalScores::mean(&lexical).expect("at least one report"),
        semantic_precision: mean(|r| r.semantic_precision),
        semantic_recall: mean(|r| r.semantic_recall),
        semantic_f1: mean(|r| r.semantic_f1),
    };
    Ok(CorpusReport {
        matched_similarities: reports
            .iter()
            .flat_map(|r| r.matched_pairs.iter().map(|p| p.similarity))
            .collect(),
        best_similarities: reports.iter().flat_map(|r| r.best_similarities.iter().copied()).collect(),
        reports,
        aggregate,
    })
}
