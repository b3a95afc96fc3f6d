//! Signal-level Monte Carlo of the power-split input construction.
//!
//! Each transmitter superposes an information component on a shared
//! energy beam:
//!
//! ```text
//! X_i,t = sqrt((1 - beta_i) P_i) W_t + U_i,t
//! ```
//!
//! with `W_t` a zero-mean unit-variance Gaussian common to all users (the
//! common randomness) and `U_i,t` independent zero-mean Gaussians carrying
//! the messages. The harvester observes `Y_2,t = sum_i h_2i X_i,t + Q_t`
//! and the empirical energy rate of a block is `B_n = (1/n) sum_t
//! Y_2,t^2 / sigma_2^2`, which concentrates on `E(beta)` as the block
//! grows. Working in SNR units (noise variance 1, user i contributing
//! power `SNR_2i`) gives the same distribution of `B_n` as the physical
//! model.
//!
//! Randomness is drawn from counter-based substreams keyed by
//! `(trial, role)`, so results are bit-identical for a given seed no
//! matter how trials are scheduled.
//!
//! Only the harvester leg is simulated; the receiver noise never enters,
//! so nothing is assumed about its joint distribution with the harvester
//! noise. Decoding performance is covered analytically by the rate
//! formulas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{PowerSplit, SnrTable};

/// Block length, trial count, outage slack and seeding for one run.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    /// Channel uses per block.
    pub n: usize,
    /// Independent blocks.
    pub trials: usize,
    /// Outage slack: a block is in outage when `B_n < target_b - epsilon`.
    pub epsilon: f64,
    pub seed: u64,
    pub split: PowerSplit,
    /// Operational energy rate the blocks are expected to deliver.
    pub target_b: f64,
}

impl SimulationConfig {
    fn validate(&self, k: usize) -> Result<()> {
        if self.n == 0 {
            return Err(Error::BadSimulation("blocklength n must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::BadSimulation("at least one trial is required"));
        }
        if self.epsilon <= 0.0 || self.epsilon.is_nan() {
            return Err(Error::BadSimulation("epsilon must be strictly positive"));
        }
        if self.split.len() != k {
            return Err(Error::BadDimension {
                field: "split",
                expected: k,
                got: self.split.len(),
            });
        }
        Ok(())
    }
}

/// Per-block empirical energy rates and their aggregate statistics.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationResult {
    #[serde(rename = "mean_B")]
    pub mean_b: f64,
    #[serde(rename = "var_B")]
    pub var_b: f64,
    pub outage_rate: f64,
    #[serde(rename = "per_trial")]
    pub empirical_b: Vec<f64>,
}

/// Renders per-trial empirical energy rates as CSV with header `trial,B`.
pub fn per_trial_csv(result: &SimulationResult) -> String {
    let mut out = String::from("trial,B\n");
    for (i, b) in result.empirical_b.iter().enumerate() {
        out.push_str(&format!("{i},{b}\n"));
    }
    out
}

/// Substream roles within a trial.
const ROLE_COMMON: u64 = 0;
const ROLE_NOISE: u64 = 1;
const ROLE_USER0: u64 = 2;

fn stream_rng(seed: u64, k: usize, trial: u64, role: u64) -> ChaCha8Rng {
    // Expand the user seed into a full key; the stream id separates
    // (trial, role) substreams.
    let mut key = [0u8; 32];
    let mut state = seed ^ 0x9e37_79b9_7f4a_7c15;
    for chunk in key.chunks_mut(8) {
        // splitmix64
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        chunk.copy_from_slice(&z.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial * (k as u64 + 2) + role);
    rng
}

struct TrialStreams {
    common: ChaCha8Rng,
    noise: ChaCha8Rng,
    users: Vec<ChaCha8Rng>,
}

impl TrialStreams {
    fn new(seed: u64, k: usize, trial: u64) -> Self {
        TrialStreams {
            common: stream_rng(seed, k, trial, ROLE_COMMON),
            noise: stream_rng(seed, k, trial, ROLE_NOISE),
            users: (0..k)
                .map(|i| stream_rng(seed, k, trial, ROLE_USER0 + i as u64))
                .collect(),
        }
    }
}

/// Amplitudes of the two components in SNR units: the energy beam
/// `sqrt((1 - beta_i) SNR_2i)` and the information part `sqrt(beta_i SNR_2i)`.
fn amplitudes(snr: &SnrTable, split: &PowerSplit) -> (Vec<f64>, Vec<f64>) {
    let beam = snr
        .snr2()
        .iter()
        .zip(split.beta())
        .map(|(&s, &b)| ((1.0 - b).max(0.0) * s).sqrt())
        .collect();
    let info = snr
        .snr2()
        .iter()
        .zip(split.beta())
        .map(|(&s, &b)| (b * s).sqrt())
        .collect();
    (beam, info)
}

/// Runs the block simulation and aggregates the empirical energy rates.
pub fn simulate_energy(snr: &SnrTable, sim: &SimulationConfig) -> Result<SimulationResult> {
    let k = snr.k();
    sim.validate(k)?;
    let (beam, info) = amplitudes(snr, &sim.split);

    let mut empirical_b = Vec::with_capacity(sim.trials);
    for trial in 0..sim.trials {
        let mut streams = TrialStreams::new(sim.seed, k, trial as u64);
        let mut acc = 0.0;
        for _ in 0..sim.n {
            let w: f64 = streams.common.sample(StandardNormal);
            let mut y: f64 = streams.noise.sample(StandardNormal);
            for i in 0..k {
                let z: f64 = streams.users[i].sample(StandardNormal);
                y += beam[i] * w + info[i] * z;
            }
            acc += y * y;
        }
        empirical_b.push(acc / sim.n as f64);
    }

    let trials = sim.trials as f64;
    let mean_b = empirical_b.iter().sum::<f64>() / trials;
    let var_b = if sim.trials > 1 {
        empirical_b
            .iter()
            .map(|b| (b - mean_b).powi(2))
            .sum::<f64>()
            / (trials - 1.0)
    } else {
        0.0
    };
    let outage = empirical_b
        .iter()
        .filter(|&&b| b < sim.target_b - sim.epsilon)
        .count();
    Ok(SimulationResult {
        mean_b,
        var_b,
        outage_rate: outage as f64 / trials,
        empirical_b,
    })
}

/// Sample Pearson correlation matrix of the generated channel inputs,
/// pooled over all blocks. The construction makes the expected off-diagonal
/// entries `sqrt((1 - beta_i)(1 - beta_j))`.
pub fn empirical_correlation(snr: &SnrTable, sim: &SimulationConfig) -> Result<Vec<Vec<f64>>> {
    let k = snr.k();
    sim.validate(k)?;
    let (beam, info) = amplitudes(snr, &sim.split);

    let mut sum = vec![0.0f64; k];
    let mut sum_sq = vec![0.0f64; k];
    let mut sum_cross = vec![vec![0.0f64; k]; k];
    let mut x = vec![0.0f64; k];
    for trial in 0..sim.trials {
        let mut streams = TrialStreams::new(sim.seed, k, trial as u64);
        for _ in 0..sim.n {
            let w: f64 = streams.common.sample(StandardNormal);
            // Keep the draw order identical to simulate_energy.
            let _q: f64 = streams.noise.sample(StandardNormal);
            for i in 0..k {
                let z: f64 = streams.users[i].sample(StandardNormal);
                x[i] = beam[i] * w + info[i] * z;
            }
            for i in 0..k {
                sum[i] += x[i];
                sum_sq[i] += x[i] * x[i];
                for j in (i + 1)..k {
                    sum_cross[i][j] += x[i] * x[j];
                }
            }
        }
    }

    let total = (sim.n * sim.trials) as f64;
    let mut corr = vec![vec![0.0f64; k]; k];
    for i in 0..k {
        corr[i][i] = 1.0;
        for j in (i + 1)..k {
            let cov = sum_cross[i][j] / total - (sum[i] / total) * (sum[j] / total);
            let var_i = sum_sq[i] / total - (sum[i] / total).powi(2);
            let var_j = sum_sq[j] / total - (sum[j] / total).powi(2);
            let denom = (var_i * var_j).sqrt();
            let r = if denom > 0.0 { cov / denom } else { 0.0 };
            corr[i][j] = r;
            corr[j][i] = r;
        }
    }
    Ok(corr)
}
