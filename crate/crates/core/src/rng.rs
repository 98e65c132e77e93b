//! The single pseudo-random generator used by every stochastic step.
//!
//! ChaCha8 is pinned so that a given `(seed, stream)` reproduces the same
//! draws on every platform and build.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SearchRng = ChaCha8Rng;

/// Stream used for the initial-solution weight trials.
pub const CONSTRUCT_STREAM: u64 = 0;
/// Stream used for Decrease-move replacement draws.
pub const SEARCH_STREAM: u64 = 1;

pub fn search_rng(seed: u64, stream: u64) -> SearchRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
