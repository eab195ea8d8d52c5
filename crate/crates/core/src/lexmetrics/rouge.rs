use super::ngram::NGramCounts;
use super::{LexError, Prf};
use crate::scalar::Real;
use crate::textcore::TokenSequence;

/// ROUGE-N for `n` in {1, 2}.
///
/// Precision is clipped overlap over candidate n-grams, recall over reference
/// n-grams. A side with no n-grams contributes a zero component.
pub fn rouge_n<T: Real>(candidate: &TokenSequence, reference: &TokenSequence, n: usize) -> Result<Prf<T>, LexError> {
    if !(1..=2).contains(&n) {
        return Err(LexError::BadOrder(n));
    }
    if reference.is_empty() {
        return Err(LexError::EmptyReference);
    }
    let c = NGramCounts::new(candidate.as_slice(), n);
    let r = NGramCounts::new(reference.as_slice(), n);
    let overlap = T::from_count(c.clipped_overlap(&r));
    let ratio = |total: usize| {
        if total == 0 {
            T::zero()
        } else {
            overlap / T::from_count(total)
        }
    };
    Ok(Prf::new(ratio(c.total()), ratio(r.total())))
}

/// Length of the longest common subsequence, two-row dynamic program.
pub fn lcs_len<S: PartialEq>(a: &[S], b: &[S]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// ROUGE-L from the exact LCS length.
pub fn rouge_l<T: Real>(candidate: &TokenSequence, reference: &TokenSequence) -> Result<Prf<T>, LexError> {
    if reference.is_empty() {
        return Err(LexError::EmptyReference);
    }
    if candidate.is_empty() {
        return Ok(Prf::zero());
    }
    let l = T::from_count(lcs_len(candidate.as_slice(), reference.as_slice()));
    Ok(Prf::new(
        l / T::from_count(candidate.len()),
        l / T::from_count(reference.len()),
    ))
}
