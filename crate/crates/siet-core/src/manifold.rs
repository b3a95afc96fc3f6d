//! Power-split solvers on the energy-constraint manifold `E(beta) = b`.
//!
//! `E` is continuous and non-increasing along any coordinate-wise
//! non-decreasing path from the all-zeros split (`E = b_coop`) to the
//! all-ones split (`E = b_ind`), so each monotone path crosses a binding
//! demand exactly once and bisection applies.

use crate::bisect::bisect_non_increasing;
use crate::error::{Error, Result};
use crate::model::{PowerSplit, SnrTable};

/// Clamped ray through the split cube: `beta_i(t) = min(1, t * w_i)`.
fn ray_point(weights: &[f64], t: f64) -> PowerSplit {
    PowerSplit::new(weights.iter().map(|w| (t * w).clamp(0.0, 1.0)).collect())
        .expect("ray points stay inside [0,1]^K")
}

/// Direction vectors covering the ray family: the largest coordinate is
/// pinned to 1 and the others range over an m-point grid in (0, 1].
pub(crate) fn direction_grid(k: usize, m: usize) -> Vec<Vec<f64>> {
    if m == 0 {
        return vec![];
    }
    let values: Vec<f64> = (1..=m).map(|i| i as f64 / m as f64).collect();
    let mut dirs = vec![vec![1.0; k]];
    for pinned in 0..k {
        let free: Vec<usize> = (0..k).filter(|&j| j != pinned).collect();
        let mut idx = vec![0usize; free.len()];
        loop {
            let mut w = vec![1.0; k];
            for (slot, &j) in free.iter().enumerate() {
                w[j] = values[idx[slot]];
            }
            if w.iter().any(|&x| x != 1.0) {
                dirs.push(w);
            }
            let mut carry = 0;
            while carry < idx.len() {
                idx[carry] += 1;
                if idx[carry] < values.len() {
                    break;
                }
                idx[carry] = 0;
                carry += 1;
            }
            if carry == idx.len() {
                break;
            }
        }
    }
    dirs
}

/// Uniform split `beta = (t, ..., t)` meeting the energy demand `b`.
///
/// For `b <= b_ind` the constraint is vacuous and the all-ones split is
/// returned; for `b_ind < b <= b_coop` the unique uniform solution of
/// `E(t, ..., t) = b` is found by bisection.
pub fn uniform_split_for_demand(snr: &SnrTable, b: f64) -> Result<PowerSplit> {
    directional_split_for_demand(snr, b, &vec![1.0; snr.k()])
}

/// Split on the ray `beta(t) = min(1, t * w)` meeting the energy demand.
///
/// Weights are normalized so the largest equals 1; every entry must be
/// strictly positive. Each direction yields exactly one manifold point.
pub fn directional_split_for_demand(snr: &SnrTable, b: f64, weights: &[f64]) -> Result<PowerSplit> {
    assert_eq!(weights.len(), snr.k(), "weight vector length must match K");
    if b < 0.0 {
        return Err(Error::NegativeDemand(b));
    }
    let b_coop = snr.b_coop();
    if b > b_coop + crate::model::DEFAULT_TOL {
        return Err(Error::InfeasibleDemand { b, b_coop });
    }
    let w_max = weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !w_max.is_finite() || weights.iter().any(|&w| w <= 0.0 || w.is_nan()) {
        return Err(Error::InvalidWeights);
    }
    let w: Vec<f64> = weights.iter().map(|x| x / w_max).collect();

    if b <= snr.b_ind() {
        // Vacuous constraint: full information power.
        return Ok(PowerSplit::full_information(snr.k()));
    }
    // t ranges up to max_i 1/w_i, where the ray has clamped to all-ones.
    let t_hi = w.iter().map(|&x| 1.0 / x).fold(0.0f64, f64::max);
    let t = bisect_non_increasing(0.0, t_hi, b, |t| snr.energy_max(&ray_point(&w, t)));
    Ok(ray_point(&w, t))
}
