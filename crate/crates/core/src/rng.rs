//! Seed plumbing.
//!
//! Every random stream in the crate is a [`ChaCha8Rng`] seeded from a 64-bit
//! value. Sub-streams (per pair, per permutation replicate) derive their seed
//! with [`derive_seed`], a SplitMix64 chain, so any job can be recomputed in
//! isolation and results never depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash a byte string into 64 bits (SplitMix64 absorbing 8-byte chunks).
pub fn hash_bytes(bytes: &[u8]) -> u64 {
    let mut h = splitmix64(bytes.len() as u64);
    for chunk in bytes.chunks(8) {
        let mut buf = [0u8; 8];
        buf[..chunk.len()].copy_from_slice(chunk);
        h = splitmix64(h ^ u64::from_le_bytes(buf));
    }
    h
}

/// Fold a sequence of words into a seed.
pub fn derive_seed(base: u64, words: &[u64]) -> u64 {
    words
        .iter()
        .fold(splitmix64(base), |h, &w| splitmix64(h ^ splitmix64(w)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
