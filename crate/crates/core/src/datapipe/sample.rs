use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Draws `n` records without replacement using a seeded ChaCha8 stream,
/// returned in their original order. `n` larger than the input takes everything.
pub fn sample_export<T: Clone>(records: &[T], n: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, records.len(), n.min(records.len())).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| records[i].clone()).collect()
}
