//! Deterministic seed derivation.
//!
//! Every random stream in the crate is a `ChaCha8Rng` seeded from a 64-bit
//! value derived from the user's master seed by SplitMix64 mixing. Derived
//! seeds depend only on the parent seed and the stream key, so work can be
//! scheduled in any order or in parallel without changing results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name of the derivation scheme, recorded in model files and reports.
pub const SEED_SCHEME: &str = "splitmix64(parent ^ splitmix64(key)) -> ChaCha8Rng::seed_from_u64";

pub type Rng = ChaCha8Rng;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for stream `key` under `parent`.
pub fn derive(parent: u64, key: u64) -> u64 {
    splitmix64(parent ^ splitmix64(key))
}

/// FNV-1a, used to turn identifiers into stream keys.
pub fn hash_str(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for tree `index` of an ensemble built from `master_seed`.
pub fn tree_seed(master_seed: u64, index: usize) -> u64 {
    derive(master_seed, index as u64)
}

/// `stable_hash(master_seed, dataset id, trial index)`.
pub fn trial_seed(master_seed: u64, dataset_id: &str, trial: usize) -> u64 {
    derive(derive(master_seed, hash_str(dataset_id)), trial as u64)
}
