use super::LexError;
use crate::scalar::Real;
use crate::textcore::{stem, TokenSequence};

/// Unigram alignment found by [`meteor_lite`]: `(candidate index, reference index)`
/// pairs sorted by candidate index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MeteorAlignment {
    pub pairs: Vec<(usize, usize)>,
}

impl MeteorAlignment {
    /// Two-stage alignment: exact surface matches first, then stem matches
    /// among the tokens still unaligned.
    pub fn align(candidate: &[String], reference: &[String]) -> Self {
        let mut cand_to_ref: Vec<Option<usize>> = vec![None; candidate.len()];
        let mut ref_used = vec![false; reference.len()];

        stage(candidate, reference, &mut cand_to_ref, &mut ref_used, |c, r| c == r);

        let cand_stems: Vec<String> = candidate.iter().map(|t| stem(t)).collect();
        let ref_stems: Vec<String> = reference.iter().map(|t| stem(t)).collect();
        stage(&cand_stems, &ref_stems, &mut cand_to_ref, &mut ref_used, |c, r| c == r);

        let pairs = cand_to_ref
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.map(|r| (i, r)))
            .collect();
        Self { pairs }
    }

    pub fn matches(&self) -> usize {
        self.pairs.len()
    }

    /// Maximal runs adjacent in both candidate and reference.
    pub fn chunks(&self) -> usize {
        if self.pairs.is_empty() {
            return 0;
        }
        1 + self
            .pairs
            .windows(2)
            .filter(|w| !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1))
            .count()
    }
}

/// Left to right over the candidate; each unaligned token takes the first free
/// matching reference position at or after the reference position of the
/// nearest aligned token to its left, falling back to the first free match.
/// Preferring forward positions keeps crossings down.
fn stage(
    candidate: &[String],
    reference: &[String],
    cand_to_ref: &mut [Option<usize>],
    ref_used: &mut [bool],
    eq: impl Fn(&str, &str) -> bool,
) {
    for i in 0..candidate.len() {
        if cand_to_ref[i].is_some() {
            continue;
        }
        let anchor = cand_to_ref[..i].iter().rev().find_map(|r| *r).map_or(0, |r| r + 1);
        let free = |j: &usize| !ref_used[*j] && eq(&candidate[i], &reference[*j]);
        let pick = (anchor..reference.len()).find(free).or_else(|| (0..anchor).find(free));
        if let Some(j) = pick {
            cand_to_ref[i] = Some(j);
            ref_used[j] = true;
        }
    }
}

/// METEOR with exact and stem matching only (no synonym tables).
///
/// `F = P·R / (0.9·P + 0.1·R)`, penalty `0.5·(chunks/matches)^3`,
/// score `F·(1 − penalty)`.
pub fn meteor_lite<T: Real>(candidate: &TokenSequence, reference: &TokenSequence) -> Result<T, LexError> {
    if reference.is_empty() {
        return Err(LexError::EmptyReference);
    }
    if candidate.is_empty() {
        return Ok(T::zero());
    }
    let alignment = MeteorAlignment::align(candidate.as_slice(), reference.as_slice());
    let m = alignment.matches();
    if m == 0 {
        return Ok(T::zero());
    }
    let mf = T::from_count(m);
    let p = mf / T::from_count(candidate.len());
    let r = mf / T::from_count(reference.len());
    let f_mean = p * r / (T::lit(0.9) * p + T::lit(0.1) * r);
    let frag = T::from_count(alignment.chunks()) / mf;
    let penalty = T::lit(0.5) * frag * frag * frag;
    Ok(f_mean * (T::one() - penalty))
}
