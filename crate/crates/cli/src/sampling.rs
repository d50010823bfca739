//! Uniform random qubit states.
//!
//! Sample `i` is drawn from its own ChaCha stream keyed by `(seed, i)`, so a
//! sample does not depend on which worker produces it or in what order.

use petz_core::petz::BlochState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::UnitSphere;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// Uniform in volume over the Bloch ball.
    #[default]
    Ball,
    /// Pure states, uniform on the sphere.
    Surface,
}

fn from_vector(r: f64, [x, y, z]: [f64; 3]) -> BlochState {
    let theta = z.clamp(-1.0, 1.0).acos();
    let phi = y.atan2(x).rem_euclid(std::f64::consts::TAU);
    BlochState { r, theta, phi }
}

/// The `index`-th state of the sequence defined by `seed`.
pub fn sample_one(seed: u64, index: u64, mode: SamplingMode) -> BlochState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let dir: [f64; 3] = rng.sample(UnitSphere);
    let r = match mode {
        SamplingMode::Ball => rng.random::<f64>().cbrt(),
        SamplingMode::Surface => 1.0,
    };
    from_vector(r, dir)
}

pub fn sample_bloch(n: usize, seed: u64, mode: SamplingMode) -> Vec<BlochState> {
    (0..n as u64).map(|i| sample_one(seed, i, mode)).collect()
}
