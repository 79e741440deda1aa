//! Seeded RNG helpers shared by the planners and the noise model.

use rand_core::{RngCore, SeedableRng};

pub use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform sample in [0, 1) with 53 bits of precision.
pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform sample in [lo, hi).
pub fn uniform_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

/// Uniform index in 0..n (n > 0).
pub fn index(rng: &mut ChaCha8Rng, n: usize) -> usize {
    // modulo bias is irrelevant at the fan-outs used here
    (rng.next_u64() % n as u64) as usize
}

/// In-place Fisher-Yates shuffle.
pub fn shuffle<T>(rng: &mut ChaCha8Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = index(rng, i + 1);
        items.swap(i, j);
    }
}

/// Uniform sample from the closed disk of radius `bound` (rejection from the
/// bounding square).
pub fn in_disk(rng: &mut ChaCha8Rng, bound: f64) -> (f64, f64) {
    if bound == 0.0 {
        return (0.0, 0.0);
    }
    loop {
        let x = uniform_in(rng, -bound, bound);
        let y = uniform_in(rng, -bound, bound);
        if x * x + y * y <= bound * bound {
            return (x, y);
        }
    }
}
