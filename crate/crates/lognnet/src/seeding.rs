//! Deterministic seed derivation for nested experiment stages.
//!
//! Fold seeds, particle-swarm streams and subset evaluations each get a
//! seed derived from the run seed instead of drawing from shared RNG
//! state. That keeps every job independent of scheduling: parallel and
//! serial execution see the same streams.

/// 64-bit mix of two values (splitmix64 finalizer over their combination).
pub fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the model trained on fold `fold` of a cross-validation run.
pub fn fold_seed(base: u64, fold: usize) -> u64 {
    mix(base, fold as u64)
}

/// Seed for evaluating a feature subset, folded over the sorted removed
/// indices. A subset's score is therefore a pure function of the subset,
/// no matter when or in what order it is evaluated.
pub fn subset_seed(base: u64, removed_sorted: impl IntoIterator<Item = usize>) -> u64 {
    let mut acc = mix(base, 0x5EED);
    for z in removed_sorted {
        acc = mix(acc, z as u64);
    }
    acc
}
