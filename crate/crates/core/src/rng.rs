//! Seed derivation for reproducible, schedule-invariant replication streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for every simulated stream.
pub type StreamRng = ChaCha8Rng;

/// SplitMix64 finalizer; a bijection on `u64`.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `index` under `master`.
///
/// For a fixed master the map is injective in the index, and for a fixed
/// index it is injective in the master, since both are compositions of
/// bijections.
pub fn derive_stream_seed(master: u64, index: u64) -> u64 {
    mix64(master.wrapping_add(mix64(index ^ 0x5851_F42D_4C95_7F2D)))
}

/// Fold an arbitrary list of words into one key, order-sensitively.
pub fn fold_key(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0x6A09_E667_F3BC_C908u64, |acc, &w| mix64(acc ^ mix64(w)))
}

pub fn stream(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}
