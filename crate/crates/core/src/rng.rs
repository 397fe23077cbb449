//! Seed derivation. Every random stream in the crate comes from a master
//! seed mixed with one or more indices, so work items can be replayed or
//! run out of order without changing results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name of the generator pipeline, echoed in solver statistics.
pub const RNG_ALGORITHM: &str = "chacha8/splitmix64";

/// The SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a seed with a sequence of stream indices.
pub fn derive_seed(seed: u64, indices: &[u64]) -> u64 {
    indices
        .iter()
        .fold(mix64(seed), |acc, &i| mix64(acc ^ mix64(i)))
}

pub fn stream(seed: u64, indices: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, indices))
}
