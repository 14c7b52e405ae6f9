//! Seeded random initial data.
//!
//! Generator: the ChaCha8 counter-based stream RNG (`rand_chacha` 0.3),
//! keyed from the scenario's 64-bit seed via `seed_from_u64`. Draws are
//! specified exactly so another implementation can reproduce them:
//!
//! - a uniform in `[0, 1)` is `(next_u64() >> 11) * 2^-53`;
//! - a standard-normal pair comes from Box-Muller,
//!   `r = sqrt(-2 ln(1 - u1))`, `n1 = r cos(2 pi u2)`, `n2 = r sin(2 pi u2)`;
//! - per mode, the first pair fills `(Re w, Im w)` and the second
//!   `(Re z, Im z)`, modes in ascending order.

use crate::spectrum::StateVector;
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1 = uniform(rng);
    let u2 = uniform(rng);
    let radius = (-2.0 * (1.0 - u1).ln()).sqrt();
    let angle = 2.0 * std::f64::consts::PI * u2;
    (radius * angle.cos(), radius * angle.sin())
}

/// Complex Gaussian state: every real component of every `(w_k, z_k)` is an
/// independent standard normal drawn from the seeded stream.
pub fn gaussian_state(seed: u64, mode_count: usize) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amplitudes = (0..mode_count)
        .map(|_| {
            let (w_re, w_im) = normal_pair(&mut rng);
            let (z_re, z_im) = normal_pair(&mut rng);
            (Complex64::new(w_re, w_im), Complex64::new(z_re, z_im))
        })
        .collect();
    StateVector::new(amplitudes).expect("gaussian draws are finite")
}

/// Seeded uniform in `[lo, hi)`; used by the verification harness to build
/// reproducible random scenarios.
pub fn uniform_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

/// Fresh deterministic stream for harness use.
pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
