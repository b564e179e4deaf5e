//! Seed derivation and the crate's RNG type.
//!
//! Every stochastic step draws from its own generator whose seed is a hash of
//! the master seed plus a path naming the step. Evaluating a subset of metrics,
//! or evaluating in a different order or thread count, therefore reproduces the
//! same numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Rng = ChaCha8Rng;

/// Index used in seed paths for steps that are not tied to a single factor.
pub const GLOBAL: u64 = u64::MAX;

pub fn derive_seed(master: u64, scope: &str, factor: u64, run: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update((scope.len() as u64).to_le_bytes());
    hasher.update(scope.as_bytes());
    hasher.update(factor.to_le_bytes());
    hasher.update(run.to_le_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn rng_from(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derive_rng(master: u64, scope: &str, factor: u64, run: u64) -> Rng {
    rng_from(derive_seed(master, scope, factor, run))
}
