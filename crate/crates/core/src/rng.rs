//! Seed derivation for reproducible, schedule-independent Monte Carlo.
//!
//! Every independent unit of work (a search run, a Hoeffding trial, a
//! simplex draw) gets its own ChaCha stream keyed by `(seed, index)`, so the
//! result of a parallel loop never depends on how rayon splits it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Generator for unit `index` under the master `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Stable 64-bit seed for a named sub-computation.
pub fn named_seed(seed: u64, name: &str) -> u64 {
    let digest = Sha256::digest(name.as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    seed ^ u64::from_le_bytes(bytes)
}
