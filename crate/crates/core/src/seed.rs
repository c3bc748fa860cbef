//! Deterministic seed derivation for parallel and batched tasks.
//!
//! Every randomised routine in this crate takes an explicit 64-bit seed.
//! Batch drivers derive per-task seeds with [`seed_mix`] so that results are
//! independent of scheduling order and identical across platforms.

/// SplitMix64 finaliser step. Bijective on `u64`.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `indices` into `base` one by one, SplitMix64-style.
///
/// Properties relied on elsewhere:
/// - `seed_mix(s, &[])` is `s` (a bare seed passes through unchanged);
/// - the fold is order sensitive, so `mix(s, [1, 2]) != mix(s, [2, 1])`;
/// - empirically collision free over the index ranges used here
///   (checked for 10^6 `(i, j)` pairs in the tests).
pub fn seed_mix(base: u64, indices: &[u64]) -> u64 {
    let mut h = base;
    for &ix in indices {
        h = splitmix64(h ^ ix.wrapping_add(0xA076_1D64_78BD_642F));
    }
    h
}
