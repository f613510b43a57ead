//! Deterministic derivation of independent RNG streams.
//!
//! Every stochastic component draws from a stream derived from the run seed
//! and a fixed salt, so parallel and serial schedules see identical streams.

/// splitmix64 finalizer; good avalanche, cheap, stable across platforms.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `(seed, salt)`.
pub fn derive(seed: u64, salt: u64) -> u64 {
    mix(seed ^ mix(salt))
}
