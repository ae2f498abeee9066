use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::vec2::Vec2;

/// Independent generator for path `stream` of a run seeded with `seed`.
pub fn path_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Two independent normal variates with standard deviation `sd`.
#[inline]
pub fn gaussian_step(rng: &mut ChaCha8Rng, sd: f64) -> Vec2 {
    let x: f64 = StandardNormal.sample(rng);
    let y: f64 = StandardNormal.sample(rng);
    Vec2::new(sd * x, sd * y)
}
