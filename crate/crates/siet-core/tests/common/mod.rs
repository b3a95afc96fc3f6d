//! Shared helpers for the integration suites: seeded random instances.
#![allow(dead_code)] // each integration target uses its own subset

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use siet_core::{PowerSplit, SnrTable};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SNRs log-uniform in [0.1, 100] on both sides.
pub fn random_snr(rng: &mut ChaCha8Rng, k: usize) -> SnrTable {
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..k)
            .map(|_| 10f64.powf(rng.random_range(-1.0..=2.0)))
            .collect()
    };
    let snr1 = draw(rng);
    let snr2 = draw(rng);
    SnrTable::new(snr1, snr2).unwrap()
}

pub fn random_split(rng: &mut ChaCha8Rng, k: usize) -> PowerSplit {
    PowerSplit::new((0..k).map(|_| rng.random_range(0.0..=1.0)).collect()).unwrap()
}

/// A demand anywhere in the feasible interval, slightly biased so both
/// regimes appear.
pub fn random_demand(rng: &mut ChaCha8Rng, snr: &SnrTable) -> f64 {
    let b_coop = snr.b_coop();
    rng.random_range(0.0..=1.0) * b_coop
}
