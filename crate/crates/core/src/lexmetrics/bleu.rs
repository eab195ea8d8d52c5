use super::ngram::NGramCounts;
use super::LexError;
use crate::scalar::Real;
use crate::textcore::TokenSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BleuOptions {
    /// Highest n-gram order, 1..=4.
    pub max_n: usize,
    /// Replace a zero clipped precision by `1 / (2 * candidate n-gram count)`.
    pub smoothing: bool,
}

impl Default for BleuOptions {
    fn default() -> Self {
        Self { max_n: 4, smoothing: true }
    }
}

fn check_order(max_n: usize) -> Result<(), LexError> {
    if (1..=4).contains(&max_n) {
        Ok(())
    } else {
        Err(LexError::BadOrder(max_n))
    }
}

fn brevity_penalty<T: Real>(cand_len: usize, ref_len: usize) -> T {
    if cand_len >= ref_len {
        T::one()
    } else {
        (T::one() - T::from_count(ref_len) / T::from_count(cand_len)).exp()
    }
}

/// Geometric mean of `(matches, total)` precisions, or zero if any is zero
/// without smoothing.
fn geometric_mean<T: Real>(precisions: &[(usize, usize)], smoothing: bool) -> T {
    let mut log_sum = T::zero();
    for &(matches, total) in precisions {
        let p = if matches > 0 {
            T::from_count(matches) / T::from_count(total)
        } else if smoothing {
            T::one() / (T::lit(2.0) * T::from_count(total))
        } else {
            return T::zero();
        };
        log_sum = log_sum + p.ln();
    }
    (log_sum / T::from_count(precisions.len())).exp()
}

/// Sentence BLEU of `candidate` against a single `reference`.
///
/// Orders above the candidate length carry no n-grams and are left out of the
/// geometric mean; the brevity penalty already charges for short candidates.
/// This keeps `bleu(x, x) == 1` for every non-empty `x`.
pub fn bleu<T: Real>(candidate: &TokenSequence, reference: &TokenSequence, opts: BleuOptions) -> Result<T, LexError> {
    check_order(opts.max_n)?;
    if reference.is_empty() {
        return Err(LexError::EmptyReference);
    }
    if candidate.is_empty() {
        return Ok(T::zero());
    }
    let orders = opts.max_n.min(candidate.len());
    let precisions: Vec<(usize, usize)> = (1..=orders)
        .map(|n| {
            let c = NGramCounts::new(candidate.as_slice(), n);
            let r = NGramCounts::new(reference.as_slice(), n);
            (c.clipped_overlap(&r), c.total())
        })
        .collect();
    let gm: T = geometric_mean(&precisions, opts.smoothing);
    Ok((gm * brevity_penalty::<T>(candidate.len(), reference.len())).min(T::one()))
}

/// Corpus BLEU with n-gram statistics pooled over all pairs.
pub fn corpus_bleu<T: Real>(pairs: &[(TokenSequence, TokenSequence)], opts: BleuOptions) -> Result<T, LexError> {
    check_order(opts.max_n)?;
    if pairs.iter().any(|(_, r)| r.is_empty()) {
        return Err(LexError::EmptyReference);
    }
    let mut pooled = vec![(0usize, 0usize); opts.max_n];
    let (mut cand_len, mut ref_len) = (0usize, 0usize);
    for (cand, reference) in pairs {
        cand_len += cand.len();
        ref_len += reference.len();
        for (n, slot) in pooled.iter_mut().enumerate() {
            let c = NGramCounts::new(cand.as_slice(), n + 1);
            let r = NGramCounts::new(reference.as_slice(), n + 1);
            slot.0 += c.clipped_overlap(&r);
            slot.1 += c.total();
        }
    }
    if cand_len == 0 {
        return Ok(T::zero());
    }
    pooled.retain(|&(_, total)| total > 0);
    let gm: T = geometric_mean(&pooled, opts.smoothing);
    Ok((gm * brevity_penalty::<T>(cand_len, ref_len)).min(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textcore::tokenize;
    use proptest::prelude::*;

    fn b(c: &str, r: &str, max_n: usize, smoothing: bool) -> f64 {
        bleu(&tokenize(c), &tokenize(r), BleuOptions { max_n, smoothing }).unwrap()
    }

    #[test]
    fn identity() {
        for n in 1..=4 {
            assert_eq!(b("no acute process", "no acute process", n, false), 1.0);
            assert_eq!(b("clear", "clear", n, true), 1.0);
        }
    }

    #[test]
    fn mirage_pair_unigram() {
        let got = b(
            "there is a definite focal consolidation no pneumothorax is appreciated",
            "there is no focal consolidation effusion or pneumothorax",
            1,
            false,
        );
        // 6 clipped matches out of 10 candidate tokens, candidate longer than reference
        assert!((got - 0.6).abs() < 1e-12);
    }

    #[test]
    fn zero_four_gram_overlap_without_smoothing() {
        assert_eq!(b("a b c d e", "a b x c d y e", 4, false), 0.0);
        assert!(b("a b c d e", "a b x c d y e", 4, true) > 0.0);
    }

    #[test]
    fn brevity_penalty_applies() {
        let got = b("a b", "a b c d", 1, false);
        assert!((got - (1.0f64 - 2.0).exp()).abs() < 1e-12);
    }

    #[test]
    fn smoothing_value() {
        // unigram 2/3, bigram 0/2 -> 1/(2*2)
        let got = b("a b c", "a x b", 2, true);
        let want = ((2.0f64 / 3.0) * 0.25).sqrt();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let e = bleu::<f64>(&tokenize("a"), &tokenize(""), BleuOptions::default());
        assert_eq!(e, Err(LexError::EmptyReference));
        let e = bleu::<f64>(&tokenize("a"), &tokenize("a"), BleuOptions { max_n: 5, smoothing: false });
        assert_eq!(e, Err(LexError::BadOrder(5)));
        assert_eq!(b("", "a", 4, true), 0.0);
    }

    #[test]
    fn corpus_pooling() {
        let pairs = vec![(tokenize("a b"), tokenize("a b")), (tokenize("c d"), tokenize("c e"))];
        let got: f64 = corpus_bleu(&pairs, BleuOptions { max_n: 1, smoothing: false }).unwrap();
        assert!((got - 0.75).abs() < 1e-12);
    }

    #[test]
    fn f32_instantiation() {
        let got: f32 = bleu(&tokenize("a b c"), &tokenize("a b c"), BleuOptions::default()).unwrap();
        assert_eq!(got, 1.0);
    }

    proptest! {
        #[test]
        fn bounded(c in proptest::collection::vec("[a-d]", 0..10), r in proptest::collection::vec("[a-d]", 1..10), n in 1usize..=4, s: bool) {
            let got: f64 = bleu(&TokenSequence::from_tokens(c), &TokenSequence::from_tokens(r), BleuOptions { max_n: n, smoothing: s }).unwrap();
            prop_assert!((0.0..=1.0).contains(&got));
        }

        #[test]
        fn non_increasing_in_order_when_precisions_decrease(
            c in proptest::collection::vec("[a-c]", 4..10),
            edit in 0usize..10,
        ) {
            let mut r = c.clone();
            let at = edit % r.len();
            r[at] = "z".to_string();
            let cand = TokenSequence::from_tokens(c);
            let reference = TokenSequence::from_tokens(r);
            let ps: Vec<f64> = (1..=4).map(|n| {
                let cc = NGramCounts::new(cand.as_slice(), n);
                let rc = NGramCounts::new(reference.as_slice(), n);
                cc.clipped_overlap(&rc) as f64 / cc.total() as f64
            }).collect();
            prop_assume!(ps.iter().all(|&p| p > 0.0));
            prop_assume!(ps.windows(2).all(|w| w[1] <= w[0]));
            for k in 1..4 {
                let lo: f64 = bleu(&cand, &reference, BleuOptions { max_n: k + 1, smoothing: false }).unwrap();
                let hi: f64 = bleu(&cand, &reference, BleuOptions { max_n: k, smoothing: false }).unwrap();
                prop_assert!(lo <= hi + 1e-12);
            }
        }
    }
}
