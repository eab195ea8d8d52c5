use std::collections::HashMap;
use std::path::{Path, PathBuf};

use layman_eval::datapipe::{
    build_dataset, dataset_stats, load_corpus, validate_dataset, BuildConfig, BuildPaths, Glossary, LaymanPair, Level,
    MockGlossaryChat, PairStatus, RefineOptions,
};
use layman_eval::embedkit::{read_records, EmbeddingCache, LocalEmbedder};
use layman_eval::jsonl::load_jsonl;
use layman_eval::semeval::{evaluate_corpus, EvalConfig, LaymanIndex, ReportRecord};
use layman_eval::statkit::similarity_histogram;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn chat() -> MockGlossaryChat {
    let fixes: HashMap<String, String> = std::fs::read_to_string(fixture("fixes.tsv"))
        .unwrap()
        .lines()
        .filter_map(|l| l.split_once('\t'))
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    MockGlossaryChat::new(Glossary::load(&fixture("glossary.tsv")).unwrap(), fixes)
}

fn build(dir: &Path) -> (PathBuf, Vec<LaymanPair>) {
    let corpus = load_corpus(fixture("reports.jsonl")).unwrap();
    let out = dir.join("dataset.jsonl");
    let config = BuildConfig {
        level: Level::Sentence,
        refine: RefineOptions::default(),
        dedup_threshold: 0.8,
        seed: 0,
    };
    let stats = build_dataset(
        &corpus,
        &config,
        &chat(),
        &LocalEmbedder::new(256).unwrap(),
        &EmbeddingCache::in_memory(),
        &BuildPaths::for_output(&out),
        false,
    )
    .unwrap();
    let pairs: Vec<LaymanPair> = load_jsonl(&out).unwrap();
    assert_eq!(pairs.len(), stats.completed);
    assert_eq!(stats.accepted + stats.flagged, stats.completed);
    (out, pairs)
}

#[test]
fn sentence_dataset_deduplicates_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let (_, pairs) = build(dir.path());
    // 21 segmented sentences; token-identical repeats drop, leaving the ten
    // distinct fixture sentences plus the short "The heart size is normal."
    assert_eq!(pairs.len(), 11);
    assert!(validate_dataset(&pairs, 0.8, 3).is_empty());
    let s = dataset_stats(&pairs);
    assert_eq!(s.count, 11);
    assert!(s.avg_words_layman > 0.0);
    assert!(pairs.iter().all(|p| p.status != PairStatus::Pending));
}

#[test]
fn report_level_keeps_every_report() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = load_corpus(fixture("reports.jsonl")).unwrap();
    let out = dir.path().join("reports.out.jsonl");
    let config = BuildConfig {
        level: Level::Report,
        ..Default::default()
    };
    let stats = build_dataset(
        &corpus,
        &config,
        &chat(),
        &LocalEmbedder::new(256).unwrap(),
        &EmbeddingCache::in_memory(),
        &BuildPaths::for_output(&out),
        false,
    )
    .unwrap();
    assert_eq!(stats.items, 10);
    assert!(stats.dedup.is_none());
    let pairs: Vec<LaymanPair> = load_jsonl(&out).unwrap();
    let ids: Vec<&str> = pairs.iter().map(|p| p.id.as_str()).collect();
    assert_eq!(ids, ["r01", "r02", "r03", "r04", "r05", "r06", "r07", "r08", "r09", "r10"]);
}

#[test]
fn built_dataset_serves_as_substitution_index() {
    let dir = tempfile::tempdir().unwrap();
    let (path, pairs) = build(dir.path());
    let provider = LocalEmbedder::new(256).unwrap();
    let cache = EmbeddingCache::in_memory();
    let index = LaymanIndex::load(&path, &provider, &cache).unwrap();
    assert_eq!(index.len(), pairs.len());

    index.save(&dir.path().join("copy.jsonl")).unwrap();
    let sidecar = read_records(&LaymanIndex::sidecar_path(&dir.path().join("copy.jsonl"))).unwrap();
    assert_eq!(sidecar.len(), pairs.len());
    let reloaded = LaymanIndex::load(&dir.path().join("copy.jsonl"), &provider, &EmbeddingCache::in_memory()).unwrap();
    assert_eq!(reloaded.vectors, index.vectors);

    let reports: Vec<ReportRecord> = load_jsonl(fixture("reports.jsonl")).unwrap();
    let report = evaluate_corpus(&reports, &reports, Some(&index), &EvalConfig::default(), &provider, &cache).unwrap();
    assert_eq!(report.aggregate.count, 10);
    assert_eq!(report.aggregate.semantic_f1, 1.0);
    // substituted sentences come from the dataset's layman side
    let layman: Vec<&str> = pairs.iter().map(|p| p.layman.as_str()).collect();
    assert!(layman.iter().any(|l| report.reports[0].candidate_text.contains(l)));

    let h = similarity_histogram(&report.best_similarities, 10, (0.0, 1.0)).unwrap();
    assert_eq!(h.total, report.best_similarities.len());
    assert_eq!(h.proportion_at_least_0_8, 1.0);
}

#[test]
fn persistent_cache_survives_reopen() {
    let dir = tempfile::tempdir().unwrap();
    let cache_path = dir.path().join("emb.cache");
    let provider = LocalEmbedder::new(64).unwrap();
    let texts = ["no pleural effusion", "heart size is normal"];
    let first = {
        let cache = EmbeddingCache::open(&cache_path).unwrap();
        layman_eval::embedkit::embed(&texts, &provider, &cache).unwrap()
    };
    let cache = EmbeddingCache::open(&cache_path).unwrap();
    assert_eq!(cache.len(), 2);
    let second = layman_eval::embedkit::embed(&texts, &provider, &cache).unwrap();
    assert_eq!(first, second);
}
