//! Seeding conventions.
//!
//! Every random stream is a `ChaCha8Rng` (from `rand_chacha` 0.9) built with
//! `SeedableRng::seed_from_u64`. Uniform reals come from `rand`'s standard
//! `f64` distribution on `[0, 1)` and normals from `rand_distr::StandardNormal`.
//! Child seeds are derived with [`mix`], the SplitMix64 finalizer applied to
//! `master + (index + 1) * golden_gamma`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ModelRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Derives the seed of child stream `index` from `master`.
pub fn mix(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ModelRng {
    ChaCha8Rng::seed_from_u64(seed)
}
