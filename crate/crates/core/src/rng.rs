//! Seed derivation for reproducible Monte Carlo runs.
//!
//! Drop `d` of a run with master seed `s` uses
//! `seed_d = splitmix64(splitmix64(s) ^ d)`. Inside a drop every phase of the
//! pipeline draws from its own ChaCha8 stream keyed by [`Stream`], so adding
//! draws to one phase never shifts the randomness of another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of drop `index` under `master`.
pub fn drop_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index)
}

/// Independent random streams used within one drop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Users = 1,
    WiFi = 2,
    SlowFading = 3,
    FastFading = 4,
    Covariance = 5,
    Activity = 6,
    Pilots = 7,
}

pub fn stream_rng(seed: u64, stream: Stream) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Plain seeded generator, for tests and examples.
pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}
