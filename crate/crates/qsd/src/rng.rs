//! Deterministic stream derivation.
//!
//! Every random quantity in the crate is drawn from a ChaCha stream whose
//! seed is derived by hashing a master seed together with the coordinates of
//! the draw (matrix entry, sweep row, ...). Output is therefore independent
//! of traversal order and of any parallel schedule.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; good avalanche, cheap.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a master seed with up to three coordinate words.
pub fn mix(seed: u64, x: u64, y: u64, z: u64) -> u64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ x);
    h = splitmix64(h ^ y);
    splitmix64(h ^ z)
}

// Domain-separation tags so entry streams and row seeds never collide.
const DOMAIN_ENTRY: u64 = 0x454e_5452;
const DOMAIN_ROW: u64 = 0x524f_57;

/// RNG stream for matrix entry `(j, k)` under `seed`.
pub fn entry_stream(seed: u64, j: usize, k: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed ^ DOMAIN_ENTRY, j as u64, k as u64, DOMAIN_ENTRY))
}

/// Per-row seed for sweep row `(n, rep)` under `seed`.
pub fn row_seed(seed: u64, n: usize, rep: usize) -> u64 {
    mix(seed ^ DOMAIN_ROW, n as u64, rep as u64, DOMAIN_ROW)
}
