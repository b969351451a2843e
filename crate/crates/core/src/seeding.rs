//! Splittable seed derivation.
//!
//! Every random stream in a run is derived from one 64-bit master seed by
//! hashing `(parent, tag, index)` with the SplitMix64 finalizer. Derived
//! streams therefore depend only on their position in the tree, never on
//! scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for `(tag, index)` under `parent`.
pub fn derive(parent: u64, tag: &str, index: u64) -> u64 {
    let mut h = splitmix64(parent ^ 0x6A09_E667_F3BC_C908);
    for b in tag.bytes() {
        h = splitmix64(h ^ b as u64);
    }
    splitmix64(h ^ splitmix64(index))
}

pub fn rng_for(parent: u64, tag: &str, index: u64) -> SimRng {
    SimRng::seed_from_u64(derive(parent, tag, index))
}
