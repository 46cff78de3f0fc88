//! Seeded randomness.
//!
//! Every draw in the crate comes from a ChaCha8 stream selected by
//! `(seed, stream id)`. ChaCha is counter based, so the values handed to one
//! consumer never depend on how many numbers another consumer pulled first.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream labels for the different consumers of randomness.
pub mod label {
    pub const RESERVOIR: u64 = 0x5245_5345_5256_4f49;
    pub const TRAIN_DATA: u64 = 0x5452_4149_4e44_4154;
    pub const TEST_DATA: u64 = 0x5445_5354_4441_5441;
    pub const TARGET: u64 = 0x5441_5247_4554_0000;
    pub const PROBE: u64 = 0x5052_4f42_4500_0000;
    pub const REPEAT: u64 = 0x5245_5045_4154_0000;
    pub const HAMILTONIAN: u64 = 0x4841_4d49_4c54_4f4e;
}

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream id for the `index`-th consumer carrying `label`.
pub fn stream_id(label: u64, index: u64) -> u64 {
    mix(label ^ mix(index))
}

/// Generator for `(seed, label, index)`.
pub fn stream(seed: u64, label: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(label, index));
    rng
}

/// Derived seed for repeat `index` of an experiment with base seed `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix(seed ^ stream_id(label::REPEAT, index))
}
