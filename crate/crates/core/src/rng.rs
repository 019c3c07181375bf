//! Seeded, splittable random streams.
//!
//! Realization `k` of a run with master seed `s` always draws from ChaCha
//! stream `k` keyed by `s`, so results do not depend on how work is spread
//! over threads.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type StreamRng = ChaCha12Rng;

/// Independent stream `index` derived from `master_seed`.
pub fn stream(master_seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Stream index reserved for auxiliary draws (state sampling, permutations)
/// that must not collide with realization streams.
pub const AUX_STREAM: u64 = u64::MAX;
