//! Seeded random number generation.
//!
//! Every stochastic routine in the crate takes an explicit `u64` seed and
//! builds its generator through [`seeded_rng`], so runs are bit-reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate (ChaCha8, a counter-based stream).
pub type Rng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for the `index`-th independent trial of a batch seeded with `seed`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    seed ^ index
}
