//! Seeding scheme.
//!
//! Every random stream is a ChaCha8 generator keyed by the 64-bit user seed
//! (expanded with `seed_from_u64`). Independent runs inside one invocation
//! use the same key with a distinct stream id: run `i` of arm `a` reads
//! stream `(a << 48) | i`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generator for run `index` of arm `arm` under `seed`.
pub fn run_rng(seed: u64, arm: u16, index: u64) -> SeededRng {
    debug_assert!(index < 1 << 48);
    stream(seed, (u64::from(arm) << 48) | index)
}
