use std::collections::BTreeMap;

use super::chat::ChatProvider;
use super::llmjson::parse_llm_json;
use super::prompts::{render_refine_prompt, render_translate_prompt};
use super::{LaymanPair, PipelineError};

/// Outcome of one self-check request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Unchanged,
    Revised(String),
}

impl Verdict {
    pub fn is_unchanged(&self) -> bool {
        matches!(self, Verdict::Unchanged)
    }
}

/// Sends `prompt`, parsing the answer; an unparseable answer is re-requested once.
fn ask(provider: &dyn ChatProvider, prompt: &str) -> Result<BTreeMap<usize, String>, PipelineError> {
    let first = parse_llm_json(&provider.complete(prompt)?);
    match first {
        Ok(map) => Ok(map),
        Err(e) => {
            log::warn!("unparseable response ({e}), retrying once");
            parse_llm_json(&provider.complete(prompt)?).map_err(|e| PipelineError::UnparseableResponse(e.to_string()))
        }
    }
}

/// Runs one batch of `n` items. `render` builds a prompt for a subset of
/// batch positions, re-indexed from 0. Indices missing from the answer are
/// asked for once more before the batch fails.
fn request_indexed(
    provider: &dyn ChatProvider,
    n: usize,
    offset: usize,
    render: impl Fn(&[usize]) -> String,
) -> Result<Vec<String>, PipelineError> {
    let mut results: Vec<Option<String>> = vec![None; n];
    let all: Vec<usize> = (0..n).collect();
    for (k, v) in ask(provider, &render(&all))? {
        if k < n && !v.trim().is_empty() {
            results[k] = Some(v);
        }
    }
    let missing: Vec<usize> = (0..n).filter(|&k| results[k].is_none()).collect();
    if !missing.is_empty() {
        log::warn!("response lacks {} of {n} indices, re-requesting them", missing.len());
        let answer = ask(provider, &render(&missing))?;
        for (j, &pos) in missing.iter().enumerate() {
            if let Some(v) = answer.get(&j).filter(|v| !v.trim().is_empty()) {
                results[pos] = Some(v.clone());
            }
        }
    }
    let still: Vec<usize> = (0..n).filter(|&k| results[k].is_none()).map(|k| k + offset).collect();
    if !still.is_empty() {
        return Err(PipelineError::IncompleteBatch(still));
    }
    Ok(results.into_iter().map(|r| r.expect("checked above")).collect())
}

fn check_batch_size(batch_size: usize) -> Result<(), PipelineError> {
    if batch_size == 0 {
        return Err(PipelineError::Precondition("batch size must be at least 1".into()));
    }
    Ok(())
}

/// Translates sentences to plain language, `batch_size` per request, in input order.
pub fn translate_batch<S: AsRef<str>>(
    sentences: &[S],
    provider: &dyn ChatProvider,
    batch_size: usize,
) -> Result<Vec<String>, PipelineError> {
    check_batch_size(batch_size)?;
    if let Some(i) = sentences.iter().position(|s| s.as_ref().trim().is_empty()) {
        return Err(PipelineError::Precondition(format!("sentence {i} is empty")));
    }
    let mut out = Vec::with_capacity(sentences.len());
    for (c, chunk) in sentences.chunks(batch_size).enumerate() {
        let render = |subset: &[usize]| {
            let picked: Vec<&str> = subset.iter().map(|&k| chunk[k].as_ref()).collect();
            render_translate_prompt(&picked)
        };
        out.extend(request_indexed(provider, chunk.len(), c * batch_size, render)?);
    }
    Ok(out)
}

/// Self-checks `(professional, layman)` pairs, `batch_size` per request.
pub fn self_check_batch<P: AsRef<str>, L: AsRef<str>>(
    pairs: &[(P, L)],
    provider: &dyn ChatProvider,
    batch_size: usize,
) -> Result<Vec<Verdict>, PipelineError> {
    check_batch_size(batch_size)?;
    for (i, (p, l)) in pairs.iter().enumerate() {
        if p.as_ref().trim().is_empty() || l.as_ref().trim().is_empty() {
            return Err(PipelineError::Precondition(format!(
                "pair {i} has an empty professional or layman text"
            )));
        }
    }
    let mut out = Vec::with_capacity(pairs.len());
    for (c, chunk) in pairs.chunks(batch_size).enumerate() {
        let render = |subset: &[usize]| {
            let originals: Vec<&str> = subset.iter().map(|&k| chunk[k].0.as_ref()).collect();
            let layman: Vec<&str> = subset.iter().map(|&k| chunk[k].1.as_ref()).collect();
            render_refine_prompt(&originals, &layman)
        };
        let revised = request_indexed(provider, chunk.len(), c * batch_size, render)?;
        out.extend(chunk.iter().zip(revised).map(|((_, l), r)| {
            if r.trim() == l.as_ref().trim() {
                Verdict::Unchanged
            } else {
                Verdict::Revised(r)
            }
        }));
    }
    Ok(out)
}

pub fn self_check(pair: &LaymanPair, provider: &dyn ChatProvider) -> Result<Verdict, PipelineError> {
    let mut v = self_check_batch(&[(pair.professional.as_str(), pair.layman.as_str())], provider, 1)?;
    Ok(v.pop().expect("one verdict per pair"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datapipe::{ChatError, Glossary, MockGlossaryChat, PairStatus};
    use std::collections::HashMap;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;

    struct Counting<C> {
        inner: C,
        calls: AtomicUsize,
    }

    impl<C: ChatProvider> ChatProvider for Counting<C> {
        fn id(&self) -> &str {
            "counting"
        }
        fn complete(&self, prompt: &str) -> Result<String, ChatError> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            self.inner.complete(prompt)
        }
    }

    /// Answers from a queue of canned responses, recording prompts.
    struct Scripted {
        answers: Mutex<Vec<String>>,
        prompts: Mutex<Vec<String>>,
    }

    impl Scripted {
        fn new(answers: &[&str]) -> Self {
            Self {
                answers: Mutex::new(answers.iter().map(|s| s.to_string()).collect()),
                prompts: Mutex::new(Vec::new()),
            }
        }
    }

    impl ChatProvider for Scripted {
        fn id(&self) -> &str {
            "scripted"
        }
        fn complete(&self, prompt: &str) -> Result<String, ChatError> {
            self.prompts.lock().unwrap().push(prompt.to_string());
            Ok(self.answers.lock().unwrap().remove(0))
        }
    }

    fn pair(prof: &str, lay: &str) -> LaymanPair {
        LaymanPair {
            id: "x".into(),
            professional: prof.into(),
            layman: lay.into(),
            similarity: 0.0,
            status: PairStatus::Pending,
            iterations: 0,
        }
    }

    #[test]
    fn glossary_translation() {
        let mock = MockGlossaryChat::new(
            Glossary::new([("pleural effusion", "extra fluid around the lungs")]),
            HashMap::new(),
        );
        let out = translate_batch(&["No evidence of pleural effusion"], &mock, 50).unwrap();
        assert_eq!(out, ["No evidence of extra fluid around the lungs"]);
        let out = translate_batch(&["No evidence of pleural effusion"], &MockGlossaryChat::echo(), 50).unwrap();
        assert_eq!(out, ["No evidence of pleural effusion"]);
    }

    #[test]
    fn request_count_is_ceil_of_batches() {
        let stub = Counting {
            inner: MockGlossaryChat::echo(),
            calls: AtomicUsize::new(0),
        };
        let sents: Vec<String> = (0..120).map(|i| format!("sentence number {i}")).collect();
        let out = translate_batch(&sents, &stub, 50).unwrap();
        assert_eq!(stub.calls.load(Ordering::SeqCst), 3);
        assert_eq!(out, sents);
    }

    #[test]
    fn missing_indices_are_re_requested_once() {
        let stub = Scripted::new(&["{\"0\": \"A\", \"2\": \"C\"}", "{\"0\": \"B\"}"]);
        assert_eq!(translate_batch(&["a", "b", "c"], &stub, 50).unwrap(), ["A", "B", "C"]);
        let prompts = stub.prompts.lock().unwrap();
        assert_eq!(prompts.len(), 2);
        assert!(prompts[1].contains("\"0\": \"b\"") && !prompts[1].contains("\"a\""));
    }

    #[test]
    fn incomplete_batch_lists_missing() {
        let stub = Scripted::new(&["{\"0\": \"A\"}", "{}"]);
        match translate_batch(&["a", "b", "c"], &stub, 50) {
            Err(PipelineError::IncompleteBatch(missing)) => assert_eq!(missing, [1, 2]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unparseable_after_one_retry() {
        let stub = Scripted::new(&["sorry", "{\"0\": \"A\"}"]);
        assert_eq!(translate_batch(&["a"], &stub, 5).unwrap(), ["A"]);
        let stub = Scripted::new(&["sorry", "still no"]);
        assert!(matches!(
            translate_batch(&["a"], &stub, 5),
            Err(PipelineError::UnparseableResponse(_))
        ));
    }

    #[test]
    fn self_check_verdicts() {
        assert_eq!(
            self_check(&pair("Effusion.", "Fluid."), &MockGlossaryChat::echo()).unwrap(),
            Verdict::Unchanged
        );
        let fixer = MockGlossaryChat::new(
            Glossary::default(),
            [("Fluid.".to_string(), "Extra fluid near the lungs.".to_string())].into_iter().collect(),
        );
        assert_eq!(
            self_check(&pair("Effusion.", "Fluid."), &fixer).unwrap(),
            Verdict::Revised("Extra fluid near the lungs.".into())
        );
        assert!(matches!(
            self_check(&pair("Effusion.", " "), &fixer),
            Err(PipelineError::Precondition(_))
        ));
    }
}
