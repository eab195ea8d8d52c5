use super::{EmbedError, EmbeddingProvider, Vector};
use crate::textcore::tokenize;

pub const MIN_LOCAL_DIM: usize = 16;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// Signed hashed bag-of-words, L2-normalized.
///
/// Each token hashes (FNV-1a over its UTF-8 bytes) to bucket `h mod dim`;
/// bit 63 of `h` set means the token subtracts instead of adds.
pub fn local_embed(text: &str, dim: usize) -> Result<Vector, EmbedError> {
    if dim < MIN_LOCAL_DIM {
        return Err(EmbedError::Config(format!("local embedding dim must be >= {MIN_LOCAL_DIM}")));
    }
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return Err(EmbedError::DegenerateVector);
    }
    let mut values = vec![0.0f64; dim];
    for token in tokens.iter() {
        let h = fnv1a64(token.as_bytes());
        let sign = if h >> 63 == 1 { -1.0 } else { 1.0 };
        values[(h % dim as u64) as usize] += sign;
    }
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        // opposite-signed collisions cancelled out
        return Err(EmbedError::DegenerateVector);
    }
    values.iter_mut().for_each(|v| *v /= norm);
    Ok(Vector::new(LocalEmbedder::provider_id_for(dim), values))
}

/// Deterministic offline provider wrapping [`local_embed`].
#[derive(Debug, Clone)]
pub struct LocalEmbedder {
    dim: usize,
    id: String,
    max_batch: usize,
}

impl LocalEmbedder {
    pub fn new(dim: usize) -> Result<Self, EmbedError> {
        if dim < MIN_LOCAL_DIM {
            return Err(EmbedError::Config(format!("local embedding dim must be >= {MIN_LOCAL_DIM}")));
        }
        Ok(Self {
            dim,
            id: Self::provider_id_for(dim),
            max_batch: 256,
        })
    }

    pub fn provider_id_for(dim: usize) -> String {
        format!("local-fnv1a-{dim}")
    }
}

impl EmbeddingProvider for LocalEmbedder {
    fn id(&self) -> &str {
        &self.id
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn max_batch(&self) -> usize {
        self.max_batch
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, EmbedError> {
        texts.iter().map(|t| local_embed(t, self.dim).map(|v| v.values)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedkit::cosine;
    use proptest::prelude::*;

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn identical_and_repeated_texts() {
        let a = local_embed("clear lungs", 64).unwrap();
        assert_eq!(a, local_embed("clear lungs", 64).unwrap());
        let x = local_embed("a b", 64).unwrap();
        let y = local_embed("a b a b", 64).unwrap();
        assert!((cosine(&x, &y).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_tokens_without_collisions_are_orthogonal() {
        let dim = 256u64;
        let left = ["heart", "size", "normal"];
        let right = ["pleural", "effusion", "absent"];
        let buckets = |ws: &[&str]| ws.iter().map(|w| fnv1a64(w.as_bytes()) % dim).collect::<Vec<_>>();
        let (bl, br) = (buckets(&left), buckets(&right));
        assert!(bl.iter().all(|b| !br.contains(b)), "fixture must be collision-free");
        let a = local_embed(&left.join(" "), 256).unwrap();
        let b = local_embed(&right.join(" "), 256).unwrap();
        assert_eq!(cosine(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_and_bad_dim() {
        assert!(matches!(local_embed("...", 64), Err(EmbedError::DegenerateVector)));
        assert!(matches!(local_embed("a", 8), Err(EmbedError::Config(_))));
    }

    proptest! {
        #[test]
        fn unit_norm(text in "[a-z ]{1,40}", dim in 16usize..300) {
            if let Ok(v) = local_embed(&text, dim) {
                prop_assert!((v.norm() - 1.0).abs() < 1e-9);
            }
        }
    }
}
