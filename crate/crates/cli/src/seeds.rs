//! Stable seed derivation for experiment cells.
//!
//! Every cell of a sweep gets its own independent seed derived from the
//! base seed and the cell's coordinates, so reruns reproduce cells
//! exactly and adding more cells (or more methods, which are not part of
//! the hash) never perturbs existing ones.

/// The 64-bit finalizer from the splitmix64 generator; a bijective
/// mixer with good avalanche behaviour.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combine an accumulator with one more coordinate.
fn fold(acc: u64, word: u64) -> u64 {
    mix(acc ^ mix(word))
}

/// Seed for one sweep cell. The method under test is deliberately not
/// an input: paired methods at the same (n, tx, index) must see the
/// identical node layout.
pub fn cell_seed(base_seed: u64, n_nodes: usize, tx_radius: f64, index: usize) -> u64 {
    let mut acc = mix(base_seed);
    acc = fold(acc, n_nodes as u64);
    acc = fold(acc, tx_radius.to_bits());
    acc = fold(acc, index as u64);
    acc
}

/// Seed for one dataset configuration draw.
pub fn config_seed(base_seed: u64, run_index: usize) -> u64 {
    fold(mix(base_seed ^ 0x5DA7_A5E7_0000_0001), run_index as u64)
}

/// Seed for one repeat of a dataset configuration.
pub fn repeat_seed(config_seed: u64, repeat_index: usize) -> u64 {
    fold(config_seed, repeat_index as u64)
}
