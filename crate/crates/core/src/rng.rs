//! Seeded, splittable randomness.
//!
//! Sample `i` of a run seeded with `s` always comes from ChaCha8 stream `i`
//! of key `s`, so shards can be drawn in any order or in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
