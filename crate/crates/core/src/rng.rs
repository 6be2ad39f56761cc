//! Seeded random streams.
//!
//! Every stream is a xoshiro256++ generator whose 64-bit seed is obtained by
//! mixing a master seed with up to two stream coordinates through the
//! SplitMix64 finalizer. `seed_from_u64` then expands that seed with
//! SplitMix64 as well, so equal inputs give bit-identical sequences.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type SimRng = Xoshiro256PlusPlus;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Independent stream identified by `(seed, index, purpose)`.
pub fn stream(seed: u64, index: u64, purpose: u64) -> SimRng {
    let s = mix64(mix64(seed ^ mix64(index)) ^ purpose.wrapping_mul(GOLDEN));
    SimRng::seed_from_u64(s)
}
