use serde::{Deserialize, Serialize};

use super::{LaymanIndex, SemevalError};
use crate::embedkit::{cosine_slices, embed_lenient, EmbedError, EmbeddingCache, EmbeddingProvider};

/// One sentence after substitution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Substitution {
    pub text: String,
    /// Index entry used, if any.
    pub entry: Option<usize>,
    /// Best similarity to an index entry; `None` for unembeddable sentences.
    pub similarity: Option<f64>,
    /// The original text was kept because the best similarity fell below the floor.
    pub below_floor: bool,
}

/// Replaces each sentence by the layman text of its most similar index entry
/// (lowest entry index on ties). With a `floor`, sentences whose best
/// similarity is below it keep their original text and are marked.
pub fn substitute_layman<S: AsRef<str>>(
    sentences: &[S],
    index: &LaymanIndex,
    floor: Option<f64>,
    provider: &dyn EmbeddingProvider,
    cache: &EmbeddingCache,
) -> Result<Vec<Substitution>, SemevalError> {
    if index.is_empty() {
        return Err(SemevalError::EmptyIndex);
    }
    if provider.id() != index.provider_id {
        return Err(EmbedError::ProviderMismatch(provider.id().to_string(), index.provider_id.clone()).into());
    }
    let texts: Vec<&str> = sentences.iter().map(AsRef::as_ref).collect();
    let vectors = embed_lenient(&texts, provider, cache)?;
    Ok(texts
        .iter()
        .zip(vectors)
        .map(|(&text, v)| {
            let Some(v) = v else {
                log::warn!("sentence {text:?} cannot be embedded, left unsubstituted");
                return Substitution {
                    text: text.to_string(),
                    entry: None,
                    similarity: None,
                    below_floor: false,
                };
            };
            let mut best: Option<(usize, f64)> = None;
            for (j, e) in index.vectors.iter().enumerate() {
                let Some(sim) = cosine_slices(&v.values, &e.values) else { continue };
                if best.is_none_or(|(_, b)| sim > b) {
                    best = Some((j, sim));
                }
            }
            match best {
                Some((j, sim)) if floor.is_none_or(|f| sim >= f) => Substitution {
                    text: index.entries[j].1.clone(),
                    entry: Some(j),
                    similarity: Some(sim),
                    below_floor: false,
                },
                Some((_, sim)) => Substitution {
                    text: text.to_string(),
                    entry: None,
                    similarity: Some(sim),
                    below_floor: true,
                },
                None => Substitution {
                    text: text.to_string(),
                    entry: None,
                    similarity: None,
                    below_floor: false,
                },
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedkit::{local_embed, LocalEmbedder};

    fn setup(entries: &[(&str, &str)]) -> (LaymanIndex, LocalEmbedder, EmbeddingCache) {
        let p = LocalEmbedder::new(256).unwrap();
        let cache = EmbeddingCache::in_memory();
        let idx = LaymanIndex::build(
            entries.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            &p,
            &cache,
        )
        .unwrap();
        (idx, p, cache)
    }

    fn texts(subs: &[Substitution]) -> Vec<&str> {
        subs.iter().map(|s| s.text.as_str()).collect()
    }

    #[test]
    fn exact_entry_wins() {
        let (idx, p, c) = setup(&[("no pleural effusion", "no extra fluid"), ("pleural effusion is small", "a little fluid")]);
        let out = substitute_layman(&["pleural effusion is small"], &idx, None, &p, &c).unwrap();
        assert_eq!(out[0].entry, Some(1));
        assert_eq!(out[0].text, "a little fluid");
    }

    #[test]
    fn singleton_index_takes_everything() {
        let (idx, p, c) = setup(&[("heart normal", "the heart is fine")]);
        let out = substitute_layman(&["lungs clear", "no effusion"], &idx, None, &p, &c).unwrap();
        assert_eq!(texts(&out), ["the heart is fine", "the heart is fine"]);
    }

    #[test]
    fn argmax_over_disjoint_entries() {
        let (idx, p, c) = setup(&[("heart size normal", "L1"), ("lungs clear bilaterally", "L2")]);
        let sentence = "both lungs clear";
        let sims: Vec<f64> = ["heart size normal", "lungs clear bilaterally"]
            .iter()
            .map(|e| {
                let a = local_embed(sentence, 256).unwrap();
                let b = local_embed(e, 256).unwrap();
                crate::embedkit::cosine(&a, &b).unwrap()
            })
            .collect();
        assert!(sims[1] > sims[0]);
        let out = substitute_layman(&[sentence], &idx, None, &p, &c).unwrap();
        assert_eq!(texts(&out), ["L2"]);
    }

    #[test]
    fn ties_go_to_lowest_index_and_floor_keeps_original() {
        let (idx, p, c) = setup(&[("alpha", "A"), ("alpha", "B")]);
        let out = substitute_layman(&["alpha", "omega"], &idx, Some(0.5), &p, &c).unwrap();
        assert_eq!(out[0].entry, Some(0));
        assert_eq!(out[1].text, "omega");
        assert!(out[1].below_floor);
    }

    #[test]
    fn degenerate_and_empty_inputs() {
        let (idx, p, c) = setup(&[("alpha", "A")]);
        let out = substitute_layman(&["..."], &idx, None, &p, &c).unwrap();
        assert_eq!(out[0].text, "...");
        assert!(substitute_layman::<&str>(&[], &idx, None, &p, &c).unwrap().is_empty());
    }

    #[test]
    fn identity_index_is_idempotent() {
        let laymans = ["no extra fluid", "the heart is fine", "lungs look healthy"];
        let entries: Vec<(&str, &str)> = laymans.iter().map(|l| (*l, *l)).collect();
        let (idx, p, c) = setup(&entries);
        let once = substitute_layman(&["the heart is fine", "no extra fluid"], &idx, None, &p, &c).unwrap();
        let twice = substitute_layman(&texts(&once), &idx, None, &p, &c).unwrap();
        assert_eq!(texts(&once), texts(&twice));
        assert_eq!(texts(&once), ["the heart is fine", "no extra fluid"]);
    }

    #[test]
    fn provider_must_match_index() {
        let (idx, _, c) = setup(&[("alpha", "A")]);
        let other = LocalEmbedder::new(128).unwrap();
        assert!(substitute_layman(&["alpha"], &idx, None, &other, &c).is_err());
    }
}
