//! Seed derivation and small sampling helpers.
//!
//! All randomness in a run flows from one 64-bit master seed. Component
//! streams are derived by hashing the master seed together with a static
//! component tag and a list of integer indices (replica, particle, node,
//! ...), so independent workers never share a stream and every run is
//! bit-reproducible regardless of scheduling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

/// Derive a 256-bit seed from `master`, a component tag and indices.
///
/// Layout hashed: `master (LE) || tag bytes || each index (LE)`.
pub fn derive_seed(master: u64, tag: &str, indices: &[u64]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(tag.as_bytes());
    for ix in indices {
        h.update(ix.to_le_bytes());
    }
    h.finalize().into()
}

/// Deterministic stream RNG for a component of a run.
pub fn stream(master: u64, tag: &str, indices: &[u64]) -> ChaCha12Rng {
    ChaCha12Rng::from_seed(derive_seed(master, tag, indices))
}

/// Exponential waiting time with the given rate. `rate` must be positive.
pub fn exp_time<R: Rng>(rng: &mut R, rate: f64) -> f64 {
    debug_assert!(rate > 0.0);
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    -u.ln() / rate
}

/// Draw an index from unnormalized nonnegative weights.
///
/// Returns the first index `i` with `sum(w[..=i]) > u * sum(w)`. Weights
/// must not all be zero.
pub fn categorical<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    debug_assert!(total > 0.0);
    let mut target = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        target -= w;
        if target < 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_seed_separates_tags_and_indices() {
        let a = derive_seed(7, "sim", &[0]);
        let b = derive_seed(7, "sim", &[1]);
        let c = derive_seed(7, "solver", &[0]);
        let d = derive_seed(8, "sim", &[0]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
        // stable across calls
        assert_eq!(a, derive_seed(7, "sim", &[0]));
    }

    #[test]
    fn exp_time_mean_matches_rate() {
        let mut rng = stream(1, "test", &[]);
        let n = 20_000;
        let mean: f64 = (0..n).map(|_| exp_time(&mut rng, 4.0)).sum::<f64>() / n as f64;
        assert!((mean - 0.25).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn categorical_frequencies() {
        let mut rng = stream(2, "test", &[]);
        let w = [1.0, 3.0, 0.0, 4.0];
        let mut counts = [0usize; 4];
        let n = 40_000;
        for _ in 0..n {
            counts[categorical(&mut rng, &w)] += 1;
        }
        assert_eq!(counts[2], 0);
        for (i, expect) in [(0, 0.125), (1, 0.375), (3, 0.5)] {
            let freq = counts[i] as f64 / n as f64;
            assert!((freq - expect).abs() < 0.01, "channel {i}: {freq}");
        }
    }
}
