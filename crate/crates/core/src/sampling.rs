//! Seeded sample streams.
//!
//! Every randomized check draws from a stream keyed by
//! `(seed, function label, check name)`, so a report never depends on which
//! other checks ran before it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::interval::Interval;

pub fn sample_stream(seed: u64, label: &str, check: &str) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update((label.len() as u64).to_le_bytes());
    hasher.update(label.as_bytes());
    hasher.update(check.as_bytes());
    ChaCha8Rng::from_seed(hasher.finalize().into())
}

/// Uniform point of `iv`.
pub fn draw(rng: &mut impl Rng, iv: &Interval) -> f64 {
    iv.lerp(rng.random::<f64>())
}
