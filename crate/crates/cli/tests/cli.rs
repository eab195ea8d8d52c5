use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use layman_eval::embedkit::{cosine, local_embed};
use layman_eval_cli::{run, Context};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_in(cwd: &Path, env: &HashMap<&str, &str>, args: &[&str]) -> Outcome {
    let lookup = |k: &str| env.get(k).map(|v| v.to_string());
    let ctx = Context {
        env: &lookup,
        cwd: cwd.to_path_buf(),
    };
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("layman-eval").chain(args.iter().copied());
    let code = run(argv, &ctx, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn cli(cwd: &Path, args: &[&str]) -> Outcome {
    run_in(cwd, &HashMap::new(), args)
}

fn lines(s: &str) -> Vec<Value> {
    s.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn summary(o: &Outcome) -> Value {
    let last = o.stderr.lines().rfind(|l| l.starts_with('{')).expect("summary line");
    serde_json::from_str(last).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn identical_candidates_and_references_score_f1_one() {
    let dir = tempfile::tempdir().unwrap();
    let reports = fixture("reports.jsonl");
    let dataset = fixture("dataset.jsonl");
    let o = cli(
        dir.path(),
        &["evaluate", "--candidates", p(&reports), "--references", p(&reports), "--dataset", p(&dataset)],
    );
    assert_eq!(o.code, 0, "{}", o.stderr);
    let rows = lines(&o.stdout);
    assert_eq!(rows.len(), 4);
    let agg = &rows[3]["aggregate"];
    assert_eq!(agg["semantic_f1"].as_f64().unwrap(), 1.0);
    assert_eq!(agg["count"].as_u64().unwrap(), 3);
    for r in &rows[..3] {
        assert_eq!(r["semantic_f1"].as_f64().unwrap(), 1.0);
        assert!((r["bleu1"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn evaluate_substitutes_layman_text_from_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let reports = fixture("reports.jsonl");
    let dataset = fixture("dataset.jsonl");
    let o = cli(
        dir.path(),
        &["evaluate", "--candidates", p(&reports), "--references", p(&reports), "--dataset", p(&dataset)],
    );
    assert_eq!(o.code, 0, "{}", o.stderr);
    let rows = lines(&o.stdout);
    let text = rows[0]["candidate_text"].as_str().unwrap();
    assert!(text.contains("fluid around the lungs"), "{text}");
}

#[test]
fn evaluate_metric_selection_drops_other_families() {
    let dir = tempfile::tempdir().unwrap();
    let reports = fixture("reports.jsonl");
    let o = cli(
        dir.path(),
        &["evaluate", "--candidates", p(&reports), "--references", p(&reports), "--no-substitute", "--metrics", "bleu"],
    );
    assert_eq!(o.code, 0, "{}", o.stderr);
    let rows = lines(&o.stdout);
    assert!(rows[0].get("bleu4").is_some());
    assert!(rows[0].get("rougeL").is_none());
    assert!(rows[0].get("semantic_f1").is_none());
}

#[test]
fn evaluate_without_dataset_needs_no_substitute() {
    let dir = tempfile::tempdir().unwrap();
    let reports = fixture("reports.jsonl");
    let o = cli(dir.path(), &["evaluate", "--candidates", p(&reports), "--references", p(&reports)]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("--dataset"));
}

#[test]
fn dedup_fixture_keeps_known_survivors() {
    // s3 and s5 repeat the tokens of s1 and s2; the four distinct sentences
    // must be pairwise below the threshold for the count to be 4.
    let texts = [
        "There is no pleural effusion.",
        "Heart size is normal.",
        "Mild atelectasis at the left base.",
        "No pneumothorax is seen.",
    ];
    for (i, a) in texts.iter().enumerate() {
        for b in &texts[i + 1..] {
            let c = cosine(&local_embed(a, 256).unwrap(), &local_embed(b, 256).unwrap()).unwrap();
            assert!(c <= 0.8, "{a} / {b}: {c}");
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("duplicates.jsonl");
    let o = cli(dir.path(), &["dedup", "--input", p(&input), "--threshold", "0.8", "--provider", "local"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let kept: Vec<String> = lines(&o.stdout).iter().map(|v| v["id"].as_str().unwrap().to_string()).collect();
    assert_eq!(kept, ["s1", "s2", "s4", "s6"]);
    let s = summary(&o);
    assert_eq!(s["kept"], 4);
    assert_eq!(s["dropped"], 2);
}

#[test]
fn missing_required_flag_prints_usage_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(dir.path(), &["dedup"]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("--input"), "{}", o.stderr);
    assert!(o.stderr.contains("Usage"), "{}", o.stderr);
}

#[test]
fn unknown_flag_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(dir.path(), &["hist", "--input", "x.jsonl", "--bogus"]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("Usage"));
}

#[test]
fn build_dataset_requires_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("reports.jsonl");
    let o = cli(dir.path(), &["build-dataset", "--input", p(&input)]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("--output"));
}

#[test]
fn malformed_input_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.jsonl"), "{\"id\":\"a\",\"text\":\"ok\"}\nnot json\n").unwrap();
    let o = cli(dir.path(), &["dedup", "--input", "bad.jsonl"]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("line 2"), "{}", o.stderr);
}

#[test]
fn unusable_cache_path_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("duplicates.jsonl");
    // a directory cannot be opened as the cache file
    let o = cli(dir.path(), &["dedup", "--input", p(&input), "--cache", p(dir.path())]);
    assert_eq!(o.code, 2, "{}", o.stderr);
}

fn show_config(cwd: &Path, env: &HashMap<&str, &str>, args: &[&str]) -> Value {
    let mut all = vec!["--show-config"];
    all.extend_from_slice(args);
    let o = run_in(cwd, env, &all);
    assert_eq!(o.code, 0, "{}", o.stderr);
    serde_json::from_str(&o.stdout).unwrap()
}

#[test]
fn config_layers_resolve_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let none = HashMap::new();
    assert_eq!(show_config(dir.path(), &none, &[])["theta"], 0.8);

    fs::write(
        dir.path().join("layman-eval.json"),
        r#"{"theta": 0.5, "batch_size": 7, "cache": "from-file.bin", "embedding": {"endpoint": "http://file"}}"#,
    )
    .unwrap();
    let v = show_config(dir.path(), &none, &[]);
    assert_eq!(v["theta"], 0.5);
    assert_eq!(v["batch_size"], 7);
    assert_eq!(v["cache"], p(&dir.path().join("from-file.bin")));
    assert_eq!(v["embedding"]["endpoint"], "http://file");

    let env: HashMap<&str, &str> = [
        ("LAYMAN_EVAL_EMBED_URL", "http://env"),
        ("LAYMAN_EVAL_CACHE", "/tmp/env-cache.bin"),
        ("LAYMAN_EVAL_API_KEY", "k"),
    ]
    .into();
    let v = show_config(dir.path(), &env, &[]);
    assert_eq!(v["theta"], 0.5);
    assert_eq!(v["embedding"]["endpoint"], "http://env");
    assert_eq!(v["cache"], "/tmp/env-cache.bin");
    assert_eq!(v["chat"]["api_key"], "k");

    let v = show_config(
        dir.path(),
        &env,
        &["--threshold", "0.9", "--embed-url", "http://flag", "--cache", "/tmp/flag.bin"],
    );
    assert_eq!(v["theta"], 0.9);
    assert_eq!(v["batch_size"], 7);
    assert_eq!(v["embedding"]["endpoint"], "http://flag");
    assert_eq!(v["cache"], "/tmp/flag.bin");
}

#[test]
fn explicit_config_replaces_conventional_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("layman-eval.json"), r#"{"theta": 0.5}"#).unwrap();
    fs::write(dir.path().join("other.json"), r#"{"theta": 0.6}"#).unwrap();
    let v = show_config(dir.path(), &HashMap::new(), &["--config", "other.json"]);
    assert_eq!(v["theta"], 0.6);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("layman-eval.json"), r#"{"thetaa": 0.5}"#).unwrap();
    let o = cli(dir.path(), &["--show-config"]);
    assert_eq!(o.code, 1);
}

#[test]
fn subcommand_honours_layered_dedup_threshold() {
    let a = "mild cardiomegaly with small left effusion";
    let b = "mild cardiomegaly with small right effusion";
    let c = cosine(&local_embed(a, 256).unwrap(), &local_embed(b, 256).unwrap()).unwrap();
    assert!(c > 0.5 && c <= 0.9, "fixture cosine {c}");

    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("in.jsonl"),
        format!("{{\"id\":\"a\",\"text\":\"{a}\"}}\n{{\"id\":\"b\",\"text\":\"{b}\"}}\n"),
    )
    .unwrap();
    fs::write(dir.path().join("layman-eval.json"), r#"{"dedup_threshold": 0.9}"#).unwrap();
    let kept = |o: Outcome| {
        assert_eq!(o.code, 0, "{}", o.stderr);
        summary(&o)["kept"].as_u64().unwrap()
    };
    assert_eq!(kept(cli(dir.path(), &["dedup", "--input", "in.jsonl"])), 2);
    assert_eq!(kept(cli(dir.path(), &["dedup", "--input", "in.jsonl", "--dedup-threshold", "0.5"])), 1);
}

fn build(dir: &Path, out: &str) -> Outcome {
    let input = fixture("reports.jsonl");
    let glossary = fixture("glossary.tsv");
    cli(
        dir,
        &["build-dataset", "--input", p(&input), "--glossary", p(&glossary), "--batch-size", "2", "-o", out],
    )
}

#[test]
fn build_dataset_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = build(dir.path(), "a.jsonl");
    let b = build(dir.path(), "b.jsonl");
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(b.code, 0, "{}", b.stderr);
    let da = fs::read(dir.path().join("a.jsonl")).unwrap();
    let db = fs::read(dir.path().join("b.jsonl")).unwrap();
    assert!(!da.is_empty());
    assert_eq!(da, db);
    assert!(!dir.path().join("a.jsonl.checkpoint.json").exists());
    let pairs = lines(std::str::from_utf8(&da).unwrap());
    assert!(pairs.iter().any(|p| p["layman"].as_str().unwrap().contains("collapsed lung")));
}

#[test]
fn sample_export_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("duplicates.jsonl");
    let run_with = |seed: &str| cli(dir.path(), &["sample-export", "--input", p(&input), "-n", "3", "--seed", seed]);
    let a = run_with("7");
    let b = run_with("7");
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(lines(&a.stdout).len(), 3);
}

#[test]
fn readability_of_single_text() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(dir.path(), &["readability", "--text", "The cat sat."]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: Value = serde_json::from_str(o.stdout.trim()).unwrap();
    // 206.835 - 1.015 * 3 - 84.6 * 1
    assert!((v["easy"].as_f64().unwrap() - 119.19).abs() < 0.01);
}

#[test]
fn correlate_kappa_and_hist_read_score_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("m.jsonl"), "{\"id\":\"a\",\"score\":1}\n{\"id\":\"b\",\"score\":2}\n{\"id\":\"c\",\"score\":3}\n").unwrap();
    // listed out of order: rows are joined by id
    fs::write(d.join("h.jsonl"), "{\"id\":\"c\",\"score\":2}\n{\"id\":\"a\",\"score\":1}\n{\"id\":\"b\",\"score\":3}\n").unwrap();
    let o = cli(d, &["correlate", "--metric", "m.jsonl", "--human", "h.jsonl"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: Value = serde_json::from_str(o.stdout.trim()).unwrap();
    assert!((v["pearson"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["spearman"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    fs::write(d.join("ka.jsonl"), "{\"id\":1,\"label\":1}\n{\"id\":2,\"label\":1}\n{\"id\":3,\"label\":0}\n{\"id\":4,\"label\":0}\n").unwrap();
    fs::write(d.join("kb.jsonl"), "{\"id\":1,\"label\":1}\n{\"id\":2,\"label\":0}\n{\"id\":3,\"label\":0}\n{\"id\":4,\"label\":1}\n").unwrap();
    let o = cli(d, &["kappa", "--a", "ka.jsonl", "--b", "kb.jsonl"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: Value = serde_json::from_str(o.stdout.trim()).unwrap();
    assert!(v["kappa"].as_f64().unwrap().abs() < 1e-12);

    fs::write(d.join("s.jsonl"), "{\"score\":0.05}\n{\"score\":0.85}\n").unwrap();
    let o = cli(d, &["hist", "--input", "s.jsonl", "--bins", "2", "--csv", "h.csv"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: Value = serde_json::from_str(o.stdout.trim()).unwrap();
    assert_eq!(v["counts"], serde_json::json!([1, 1]));
    assert_eq!(v["proportion_at_least_0_8"], 0.5);
    assert!(fs::read_to_string(d.join("h.csv")).unwrap().starts_with("lower,upper,count"));
}

#[test]
fn diversity_of_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("r.jsonl"), "{\"id\":\"a\",\"text\":\"clear lungs\"}\n{\"id\":\"b\",\"text\":\"Clear lungs.\"}\n").unwrap();
    let o = cli(dir.path(), &["diversity", "--input", "r.jsonl"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: Value = serde_json::from_str(o.stdout.trim()).unwrap();
    assert!((v["mean"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v["variance"].as_f64().unwrap().abs() < 1e-12);
}
