//! Seeded randomness shared by every stage.
//!
//! All randomness flows through [`Prng`], the xoshiro256++ generator seeded
//! from a single `u64` via splitmix64. Gaussian variates use the Box–Muller
//! transform so the stream of draws is fully specified by the seed.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// The one PRNG algorithm used across the crate.
pub type Prng = Xoshiro256PlusPlus;

pub fn prng(seed: u64) -> Prng {
    Prng::seed_from_u64(seed)
}

/// One round of the splitmix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stage seed from a master seed and a stage tag.
///
/// `derive_seed(m, s) = splitmix64(splitmix64(m) ^ splitmix64(s + 0x5EED))`.
pub fn derive_seed(master: u64, stage: u64) -> u64 {
    splitmix64(splitmix64(master) ^ splitmix64(stage.wrapping_add(0x5EED)))
}

/// Stage tags for [`derive_seed`].
pub mod stage {
    pub const SIMULATE: u64 = 1;
    pub const PERMUTE: u64 = 2;
    pub const GRID_INIT: u64 = 3;
    pub const TRAIN: u64 = 4;
    pub const PHASE: u64 = 5;
    pub const PARAMS: u64 = 6;
    /// Batch run `i` uses `RUN_BASE + i`.
    pub const RUN_BASE: u64 = 1_000;
}

/// Uniform draw in `[lo, hi)`.
pub fn uniform(rng: &mut Prng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Standard normal variates from the Box–Muller transform.
///
/// Each pair of uniforms yields two variates; the second one is cached.
#[derive(Debug, Clone, Default)]
pub struct BoxMuller {
    spare: Option<f64>,
}

impl BoxMuller {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sample(&mut self, rng: &mut Prng) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] keeps ln finite.
        let u1 = 1.0 - rng.random::<f64>();
        let u2 = rng.random::<f64>();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }
}
