//! Seed handling. Every stochastic routine derives its generator from an
//! explicit `u64` seed so that serial and parallel runs agree bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of sub-stream `index` from `seed`. Trial `i` of a
/// simulation seeded with `s` always draws from `split_seed(s, i)`.
#[inline]
pub fn split_seed(seed: u64, index: u64) -> u64 {
    mix64(mix64(seed) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sub_rng(seed: u64, index: u64) -> Rng {
    rng(split_seed(seed, index))
}

/// 64-bit fingerprint of a byte string.
pub fn fingerprint(bytes: &[u8]) -> u64 {
    let mut h = 0x243F_6A88_85A3_08D3u64 ^ bytes.len() as u64;
    let mut chunks = bytes.chunks_exact(8);
    for c in &mut chunks {
        let w = u64::from_le_bytes(c.try_into().unwrap());
        h = (h ^ mix64(w)).rotate_left(27).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    }
    let mut tail = [0u8; 8];
    let rem = chunks.remainder();
    tail[..rem.len()].copy_from_slice(rem);
    h = (h ^ mix64(u64::from_le_bytes(tail))).rotate_left(27).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    mix64(h)
}
