//! Seeded random sources. Every randomized routine in the crate draws from
//! a ChaCha8 stream so results are reproducible across platforms.

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::C64;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream derived from a parent seed and a stream index.
pub fn substream(seed: u64, stream: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Standard complex Gaussian with E|z|^2 = 1.
pub fn complex_normal(rng: &mut impl Rng) -> C64 {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    C64::new(normal(rng) * s, normal(rng) * s)
}

pub fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Uniform point in the closed disc of radius `r`.
pub fn uniform_disc(rng: &mut impl Rng, r: f64) -> C64 {
    let rho = r * rng.random::<f64>().sqrt();
    let t = uniform(rng, -core::f64::consts::PI, core::f64::consts::PI);
    C64::from_polar(rho, t)
}

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    uniform(rng, lo.ln(), hi.ln()).exp()
}
