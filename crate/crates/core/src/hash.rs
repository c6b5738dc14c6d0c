//! Seeded 64-bit FNV-1a with a SplitMix64 finalizer.
//!
//! `hash(seed, bytes)`: start from the FNV-1a offset basis, fold in the eight
//! little-endian bytes of `seed`, then the payload bytes, each step being
//! `h ^= byte; h *= 0x100000001b3`. The result is passed through [`mix64`].

use crate::rng::mix64;

const FNV_OFFSET: u64 = 0xCBF2_9CE4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01B3;

#[inline]
fn fnv_step(h: u64, bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(h, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

pub fn seeded_hash(seed: u64, bytes: &[u8]) -> u64 {
    let h = fnv_step(FNV_OFFSET, &seed.to_le_bytes());
    mix64(fnv_step(h, bytes))
}

/// Plain FNV-1a over `bytes`, without seed or finalizer.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    fnv_step(FNV_OFFSET, bytes)
}
