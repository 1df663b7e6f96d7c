//! Deterministic per-stream random number derivation.
//!
//! Every random draw in the crate comes from a ChaCha8 stream keyed by a
//! 64-bit mix of the experiment seed and a stable stream index (for example
//! a bump's position in its center family). Draws are therefore independent
//! of evaluation order and identical across thread counts and platforms.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; decorrelates consecutive seed/stream pairs.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// RNG for stream `stream` of experiment seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let key = mix64(mix64(seed) ^ mix64(stream.wrapping_mul(0xd605_bbb5_8c8a_bc03)));
    ChaCha8Rng::seed_from_u64(key)
}
