//! Keyed deterministic random streams.
//!
//! Every randomized operation derives its generator from a 64-bit seed plus a
//! list of string keys (pair id, task name, ...), so results do not depend on
//! iteration order or on how work is spread across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

/// Generator for a plain seed, used where a single sequential stream suffices.
pub fn seeded(seed: u64) -> StreamRng {
    keyed(seed, &[])
}

/// Generator for `(seed, keys...)`. Keys are length-prefixed before hashing
/// so `["ab", "c"]` and `["a", "bc"]` give different streams.
pub fn keyed(seed: u64, keys: &[&str]) -> StreamRng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    for key in keys {
        hasher.update((key.len() as u64).to_le_bytes());
        hasher.update(key.as_bytes());
    }
    let digest: [u8; 32] = hasher.finalize().into();
    ChaCha8Rng::from_seed(digest)
}
