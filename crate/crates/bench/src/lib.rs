//! Shared inputs for the criterion benches.

use ftpid_core::fixtures::{random_system, RandomSystemSpec};
use ftpid_core::JointSystem;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `count` seeded random systems over `n` sources with alphabets up to 3.
pub fn random_systems(seed: u64, n: usize, count: usize) -> Vec<JointSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_system(&mut rng, &RandomSystemSpec::new(n, 3)))
        .collect()
}
