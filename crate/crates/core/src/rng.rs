//! Seeded random streams keyed by work-item index.
//!
//! Each work item gets its own ChaCha stream derived from `(seed, key)`, so
//! results do not depend on the order in which items are evaluated.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream for a single key.
pub fn stream(seed: u64, key: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(key);
    rng
}

/// Stream for a two-level key such as (sample, perturbation).
pub fn stream2(seed: u64, outer: u64, inner: u64) -> ChaCha8Rng {
    stream(seed, splitmix64(outer ^ splitmix64(inner)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
