//! Channel configuration, derived SNRs and the maximum-energy-rate surface.
//!
//! A K-user Gaussian multiple access channel feeds one information decoder
//! and one energy harvester. Everything downstream depends on the channel
//! only through the per-user SNRs
//!
//! ```text
//! SNR_ji = |h_ji|^2 * p_max_i / sigma_j^2        (j = 1 receiver, j = 2 harvester)
//! ```
//!
//! so noise variances are folded into an [`SnrTable`] once and all later
//! quantities are dimensionless. With a power split `beta` (fraction of each
//! budget spent on information), the largest energy rate the harvester can
//! see is
//!
//! ```text
//! E(beta) = 1 + sum_j beta_j SNR_2j + (sum_j sqrt((1 - beta_j) SNR_2j))^2
//! ```
//!
//! which interpolates between `b_ind` (independent inputs, all beta_j = 1)
//! and `b_coop` (fully correlated inputs, all beta_j = 0).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used for closed-interval comparisons against bounds.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Physical channel description: gains, noise variances and power budgets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// Number of users (K >= 2).
    pub k: usize,
    /// Gains to the receiver, one per user.
    pub h1: Vec<f64>,
    /// Gains to the energy harvester, one per user.
    pub h2: Vec<f64>,
    /// Receiver noise variance.
    pub sigma1_sq: f64,
    /// Harvester noise variance.
    pub sigma2_sq: f64,
    /// Per-user average power budgets.
    pub p_max: Vec<f64>,
}

impl ChannelConfig {
    /// Checks every invariant and returns the config unchanged on success.
    ///
    /// The gain vectors must satisfy the energy-conservation condition
    /// `||h_j||^2 <= 1`, both noise variances must be positive, power
    /// budgets non-negative, and K >= 2 with matching vector lengths.
    pub fn validated(self) -> Result<Self> {
        if self.k < 2 {
            return Err(Error::KTooSmall(self.k));
        }
        for (field, v) in [("h1", &self.h1), ("h2", &self.h2), ("p_max", &self.p_max)] {
            if v.len() != self.k {
                return Err(Error::BadDimension {
                    field,
                    expected: self.k,
                    got: v.len(),
                });
            }
        }
        for (side, h) in [(1u8, &self.h1), (2u8, &self.h2)] {
            let norm_sq: f64 = h.iter().map(|x| x * x).sum();
            if norm_sq > 1.0 + DEFAULT_TOL {
                return Err(Error::NormViolation { side, norm_sq });
            }
        }
        for (side, s) in [(1u8, self.sigma1_sq), (2u8, self.sigma2_sq)] {
            if s <= 0.0 || s.is_nan() {
                return Err(Error::NonPositiveVariance { side, value: s });
            }
        }
        if let Some((index, &value)) = self.p_max.iter().enumerate().find(|(_, &p)| p < 0.0) {
            return Err(Error::NegativePower { index, value });
        }
        Ok(self)
    }

    /// Derived SNR table, `snr_j[i] = |h_ji|^2 p_max_i / sigma_j^2`.
    pub fn snr_table(&self) -> SnrTable {
        let snr = |h: &[f64], sigma_sq: f64| {
            h.iter()
                .zip(&self.p_max)
                .map(|(h, p)| h * h * p / sigma_sq)
                .collect()
        };
        SnrTable {
            snr1: snr(&self.h1, self.sigma1_sq),
            snr2: snr(&self.h2, self.sigma2_sq),
        }
    }
}

/// Dimensionless per-user SNRs towards the receiver (`snr1`) and the
/// harvester (`snr2`). Noise variances are already folded in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrTable {
    snr1: Vec<f64>,
    snr2: Vec<f64>,
}

impl SnrTable {
    /// Builds a table from raw SNR vectors, checking non-negativity and K >= 2.
    pub fn new(snr1: Vec<f64>, snr2: Vec<f64>) -> Result<Self> {
        if snr1.len() < 2 {
            return Err(Error::KTooSmall(snr1.len()));
        }
        if snr2.len() != snr1.len() {
            return Err(Error::BadDimension {
                field: "snr2",
                expected: snr1.len(),
                got: snr2.len(),
            });
        }
        for (side, v) in [(1u8, &snr1), (2u8, &snr2)] {
            if let Some((index, &value)) = v
                .iter()
                .enumerate()
                .find(|(_, &x)| x < 0.0 || !x.is_finite())
            {
                return Err(Error::NegativeSnr { side, index, value });
            }
        }
        Ok(Self { snr1, snr2 })
    }

    /// Symmetric table with every SNR equal on both sides; test helper.
    pub fn symmetric(k: usize, snr: f64) -> Result<Self> {
        Self::new(vec![snr; k], vec![snr; k])
    }

    pub fn k(&self) -> usize {
        self.snr1.len()
    }

    pub fn snr1(&self) -> &[f64] {
        &self.snr1
    }

    pub fn snr2(&self) -> &[f64] {
        &self.snr2
    }

    /// Maximum energy rate under independent (information-bearing) inputs:
    /// `1 + sum_i SNR_2i`.
    pub fn b_ind(&self) -> f64 {
        1.0 + self.snr2.iter().sum::<f64>()
    }

    /// Maximum feasible energy rate, achieved by fully correlated inputs:
    /// `1 + (sum_i sqrt(SNR_2i))^2`.
    pub fn b_coop(&self) -> f64 {
        let s: f64 = self.snr2.iter().map(|x| x.sqrt()).sum();
        1.0 + s * s
    }

    /// Largest energy rate achievable with power split `beta`:
    /// `E(beta) = 1 + sum beta_j SNR_2j + (sum sqrt((1-beta_j) SNR_2j))^2`.
    pub fn energy_max(&self, split: &PowerSplit) -> f64 {
        assert_eq!(split.len(), self.k(), "power split length must match K");
        let mut info = 0.0;
        let mut beam = 0.0;
        for (&beta, &snr) in split.beta().iter().zip(&self.snr2) {
            info += beta * snr;
            // (1 - beta) can round slightly negative at beta = 1.
            beam += ((1.0 - beta).max(0.0) * snr).sqrt();
        }
        1.0 + info + beam * beam
    }

    /// `energy_max` with one coordinate overridden; used by the deviation
    /// oracle without cloning the split.
    pub(crate) fn energy_max_with(&self, split: &PowerSplit, user: usize, beta_i: f64) -> f64 {
        let mut info = 0.0;
        let mut beam = 0.0;
        for (i, &snr) in self.snr2.iter().enumerate() {
            let beta = if i == user { beta_i } else { split.beta()[i] };
            info += beta * snr;
            beam += ((1.0 - beta).max(0.0) * snr).sqrt();
        }
        1.0 + info + beam * beam
    }

    /// Whether an energy demand `b` can be met at all: `0 <= b <= b_coop`,
    /// closed interval compared with tolerance `tol`.
    pub fn is_feasible(&self, b: f64, tol: f64) -> Result<bool> {
        if b < 0.0 {
            return Err(Error::NegativeDemand(b));
        }
        Ok(b <= self.b_coop() + tol)
    }
}

/// Per-user fraction of power spent on information-carrying symbols.
/// The remaining `1 - beta_i` funds the common-randomness energy beam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerSplit(Vec<f64>);

impl PowerSplit {
    pub fn new(beta: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = beta
            .iter()
            .enumerate()
            .find(|(_, &b)| !(0.0..=1.0).contains(&b) || !b.is_finite())
        {
            return Err(Error::InvalidSplit { index, value });
        }
        Ok(Self(beta))
    }

    /// All-ones split: every user sends information only.
    pub fn full_information(k: usize) -> Self {
        Self(vec![1.0; k])
    }

    /// All-zeros split: every user sends energy beams only.
    pub fn full_energy(k: usize) -> Self {
        Self(vec![0.0; k])
    }

    pub fn beta(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn set(&mut self, i: usize, value: f64) {
        self.0[i] = value.clamp(0.0, 1.0);
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// A JSON channel description: either physical (`k`, `h1`, `h2`,
/// `sigma1_sq`, `sigma2_sq`, `p_max`) or direct SNRs (`snr1`, `snr2`).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ConfigDocument {
    Physical(ChannelConfig),
    DirectSnr { snr1: Vec<f64>, snr2: Vec<f64> },
}

impl ConfigDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Validates and reduces the document to its SNR table.
    pub fn into_snr_table(self) -> Result<SnrTable> {
        match self {
            ConfigDocument::Physical(cfg) => Ok(cfg.validated()?.snr_table()),
            ConfigDocument::DirectSnr { snr1, snr2 } => SnrTable::new(snr1, snr2),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_base() -> ChannelConfig {
        ChannelConfig {
            k: 2,
            h1: vec![0.7, 0.7],
            h2: vec![0.7, 0.7],
            sigma1_sq: 1.0,
            sigma2_sq: 1.0,
            p_max: vec![10.0 / 0.49, 10.0 / 0.49],
        }
    }

    #[test]
    fn validate_accepts_norm_at_most_one() {
        // ||h||^2 = 2 * 0.49 = 0.98 <= 1
        assert!(cfg_base().validated().is_ok());
    }

    #[test]
    fn validate_rejects_norm_violation() {
        let cfg = ChannelConfig {
            h1: vec![1.0, 1.0],
            ..cfg_base()
        };
        assert!(matches!(
            cfg.validated(),
            Err(Error::NormViolation { side: 1, .. })
        ));
    }

    #[test]
    fn validate_rejects_k_below_two() {
        let cfg = ChannelConfig {
            k: 1,
            h1: vec![0.7],
            h2: vec![0.7],
            p_max: vec![1.0],
            ..cfg_base()
        };
        assert!(matches!(cfg.validated(), Err(Error::KTooSmall(1))));
    }

    #[test]
    fn validate_rejects_bad_dimension() {
        let cfg = ChannelConfig {
            h2: vec![0.7],
            ..cfg_base()
        };
        assert!(matches!(
            cfg.validated(),
            Err(Error::BadDimension { field: "h2", .. })
        ));
    }

    #[test]
    fn validate_rejects_nonpositive_variance_and_negative_power() {
        let cfg = ChannelConfig {
            sigma2_sq: 0.0,
            ..cfg_base()
        };
        assert!(matches!(
            cfg.validated(),
            Err(Error::NonPositiveVariance { side: 2, .. })
        ));
        let cfg = ChannelConfig {
            p_max: vec![10.0, -1.0],
            ..cfg_base()
        };
        assert!(matches!(
            cfg.validated(),
            Err(Error::NegativePower { index: 1, .. })
        ));
    }

    #[test]
    fn snr_table_hits_target_snr() {
        // h = 0.7, p_max = 10 / 0.49 inverts to SNR = 10 on both sides.
        let snr = cfg_base().validated().unwrap().snr_table();
        for side in [snr.snr1(), snr.snr2()] {
            for &s in side {
                assert!((s - 10.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn snr_table_zero_power_and_zero_gain() {
        let cfg = ChannelConfig {
            p_max: vec![0.0, 0.0],
            ..cfg_base()
        }
        .validated()
        .unwrap();
        assert!(cfg.snr_table().snr1().iter().all(|&s| s == 0.0));

        let cfg = ChannelConfig {
            h2: vec![0.0, 0.0],
            ..cfg_base()
        }
        .validated()
        .unwrap();
        assert!(cfg.snr_table().snr2().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn snr_scales_inversely_with_variance() {
        let base = cfg_base().validated().unwrap();
        let doubled = ChannelConfig {
            sigma1_sq: 2.0,
            sigma2_sq: 2.0,
            ..cfg_base()
        }
        .validated()
        .unwrap();
        let (a, b) = (base.snr_table(), doubled.snr_table());
        for i in 0..2 {
            assert!((a.snr1()[i] / b.snr1()[i] - 2.0).abs() < 1e-12);
            assert!((a.snr2()[i] / b.snr2()[i] - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_bounds_at_snr_ten() {
        let snr = SnrTable::symmetric(2, 10.0).unwrap();
        assert_eq!(snr.b_ind(), 21.0);
        assert!((snr.b_coop() - 41.0).abs() < 1e-12);

        let snr3 = SnrTable::new(vec![0.0; 3], vec![10.0, 10.0, 10.0]).unwrap();
        assert_eq!(snr3.b_ind(), 31.0);

        let quiet = SnrTable::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(quiet.b_ind(), 1.0);
        assert_eq!(quiet.b_coop(), 1.0);
    }

    #[test]
    fn energy_max_endpoints() {
        let snr = SnrTable::symmetric(2, 10.0).unwrap();
        assert_eq!(
            snr.energy_max(&PowerSplit::full_information(2)),
            snr.b_ind()
        );
        assert!((snr.energy_max(&PowerSplit::full_energy(2)) - snr.b_coop()).abs() < 1e-12);

        // Symmetric two-user case is linear: E(t, t) = 41 - 20 t.
        let split = PowerSplit::new(vec![0.615, 0.615]).unwrap();
        assert!((snr.energy_max(&split) - 28.7).abs() < 1e-12);
    }

    #[test]
    fn feasibility_interval_is_closed() {
        let snr = SnrTable::symmetric(2, 10.0).unwrap();
        assert!(snr.is_feasible(28.7, DEFAULT_TOL).unwrap());
        assert!(snr.is_feasible(41.0, DEFAULT_TOL).unwrap());
        assert!(!snr.is_feasible(41.0001, DEFAULT_TOL).unwrap());
        assert!(matches!(
            snr.is_feasible(-1.0, DEFAULT_TOL),
            Err(Error::NegativeDemand(_))
        ));
    }

    #[test]
    fn power_split_validation() {
        assert!(PowerSplit::new(vec![0.0, 1.0]).is_ok());
        assert!(matches!(
            PowerSplit::new(vec![0.5, 1.2]),
            Err(Error::InvalidSplit { index: 1, .. })
        ));
        assert!(PowerSplit::new(vec![f64::NAN, 0.5]).is_err());
    }

    #[test]
    fn config_document_both_forms() {
        let physical = r#"{"k":2,"h1":[0.7,0.7],"h2":[0.7,0.7],"sigma1_sq":1.0,"sigma2_sq":1.0,"p_max":[20.408163265306122,20.408163265306122]}"#;
        let snr = ConfigDocument::from_json(physical)
            .unwrap()
            .into_snr_table()
            .unwrap();
        assert!((snr.snr1()[0] - 10.0).abs() < 1e-12);

        let direct = r#"{"snr1":[10,10],"snr2":[10,10]}"#;
        let snr = ConfigDocument::from_json(direct)
            .unwrap()
            .into_snr_table()
            .unwrap();
        assert_eq!(snr.snr2(), &[10.0, 10.0]);
    }
}
