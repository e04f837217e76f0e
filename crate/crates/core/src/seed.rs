//! Deterministic seed splitting.
//!
//! Every randomized stage derives its seed from one top-level seed via
//! [`derive`], so two runs with the same root seed draw identical labeled
//! samples and fold orders regardless of which model they evaluate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stage tags fed to [`derive`].
pub mod stage {
    pub const SPLIT: u64 = 1;
    pub const NORMALIZE: u64 = 2;
    pub const DICTIONARY: u64 = 3;
    pub const SAMPLE: u64 = 4;
    pub const BAD_DATA: u64 = 5;
    pub const FOLD_ORDER: u64 = 6;
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed as a splitmix64 chain over `root` and `path`.
pub fn derive(root: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(root), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
