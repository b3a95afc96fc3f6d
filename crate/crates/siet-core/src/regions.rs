//! The centralized information-energy capacity region.
//!
//! For a demand `b`, a tuple `(R_1, ..., R_K, B)` lies in the region when
//! some power split `beta` in `[0,1]^K` simultaneously satisfies every
//! subset rate constraint
//!
//! ```text
//! sum_{j in U} R_j <= 1/2 log2(1 + sum_{j in U} beta_j SNR_1j)
//! ```
//!
//! and the energy window `b <= B <= E(beta)`. Membership quantifies over a
//! continuum of splits; it is decided here by a deterministic grid search
//! augmented with analytic witness candidates (inverting the corner-rate
//! maps, and splits solved on the manifold `E(beta) = B`) and a local
//! coordinate-descent refinement. A `true` is certified by an explicit
//! witness split; a `false` is accurate up to the configured resolution.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifold::{direction_grid, directional_split_for_demand};
use crate::model::{PowerSplit, SnrTable, DEFAULT_TOL};
use crate::rates;

/// An information-rate vector together with an energy rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateTuple {
    r: Vec<f64>,
    b_rate: f64,
}

impl RateTuple {
    pub fn new(r: Vec<f64>, b_rate: f64) -> Result<Self> {
        if let Some((index, &value)) = r
            .iter()
            .enumerate()
            .find(|(_, &x)| x < 0.0 || !x.is_finite())
        {
            return Err(Error::InvalidRate { index, value });
        }
        if b_rate < 0.0 || !b_rate.is_finite() {
            return Err(Error::InvalidRate {
                index: r.len(),
                value: b_rate,
            });
        }
        Ok(Self { r, b_rate })
    }

    pub fn rates(&self) -> &[f64] {
        &self.r
    }

    pub fn b_rate(&self) -> f64 {
        self.b_rate
    }

    pub fn sum_rate(&self) -> f64 {
        self.r.iter().sum()
    }
}

/// Resolution of the membership search.
#[derive(Debug, Clone)]
pub struct GridSpec {
    /// Grid points per split axis (inclusive of 0 and 1).
    pub points_per_axis: usize,
    /// Enables analytic witness candidates and coordinate-descent
    /// refinement on top of the raw grid. Disable to get pure-grid
    /// semantics (useful to compare against an exhaustive oracle).
    pub refine: bool,
    /// Directions per pinned axis for manifold witness candidates.
    pub manifold_dirs: usize,
    /// Absolute tolerance for constraint comparisons.
    pub tol: f64,
}

impl GridSpec {
    /// Defaults by user count: 64 points per axis for K = 2, 16 for K = 3,
    /// 8 for K = 4 and 4 beyond that.
    pub fn for_k(k: usize) -> Self {
        let (points_per_axis, manifold_dirs) = match k {
            0..=2 => (64, 33),
            3 => (16, 9),
            4 => (8, 5),
            _ => (4, 3),
        };
        Self {
            points_per_axis,
            refine: true,
            manifold_dirs,
            tol: DEFAULT_TOL,
        }
    }

    /// Pure grid search at the given resolution, no refinement.
    pub fn grid_only(points_per_axis: usize, tol: f64) -> Self {
        Self {
            points_per_axis,
            refine: false,
            manifold_dirs: 0,
            tol,
        }
    }
}

/// Upper bound on the sum rate of a user subset at a given split:
/// `1/2 log2(1 + sum_{j in U} beta_j SNR_1j)`. Users are 0-indexed.
pub fn sum_rate_bound(snr: &SnrTable, split: &PowerSplit, subset: &[usize]) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut total = 0.0;
    for &j in subset {
        assert!(j < snr.k(), "user index {j} out of range");
        total += split.beta()[j] * snr.snr1()[j];
    }
    Ok(0.5 * (1.0 + total).log2())
}

/// Feasibility margins of a fixed rate point as a function of the split:
/// the minimum over all subset-rate slacks and the energy slack.
struct MarginEval<'a> {
    snr: &'a SnrTable,
    k: usize,
    /// Rate sums per user-subset bitmask.
    rate_sums: Vec<f64>,
    target_b: f64,
}

impl<'a> MarginEval<'a> {
    fn new(snr: &'a SnrTable, pt: &RateTuple) -> Self {
        let k = snr.k();
        let mut rate_sums = vec![0.0; 1 << k];
        for mask in 1usize..(1 << k) {
            let low = mask.trailing_zeros() as usize;
            rate_sums[mask] = rate_sums[mask & (mask - 1)] + pt.rates()[low];
        }
        Self {
            snr,
            k,
            rate_sums,
            target_b: pt.b_rate(),
        }
    }

    fn subset_powers(&self, beta: &[f64]) -> Vec<f64> {
        let mut sums = vec![0.0; 1 << self.k];
        for mask in 1usize..(1 << self.k) {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = sums[mask & (mask - 1)] + beta[low] * self.snr.snr1()[low];
        }
        sums
    }

    fn margin(&self, beta: &[f64]) -> f64 {
        let sums = self.subset_powers(beta);
        let mut m = f64::INFINITY;
        for (sum, rates) in sums.iter().zip(&self.rate_sums).skip(1) {
            m = m.min(0.5 * (1.0 + sum).log2() - rates);
        }
        let split = PowerSplit::new(beta.to_vec()).expect("candidate stays in [0,1]^K");
        m.min(self.snr.energy_max(&split) - self.target_b)
    }

    /// Best value of coordinate `i` with the others held fixed. Along one
    /// coordinate the rate slacks are non-decreasing and the energy slack
    /// non-increasing, so their min is unimodal and the maximizer sits at
    /// an endpoint or at the crossing.
    fn optimize_coord(&self, beta: &[f64], i: usize) -> f64 {
        let split = PowerSplit::new(beta.to_vec()).unwrap();
        let sums = self.subset_powers(beta);
        let s_i = self.snr.snr1()[i];
        let masks: Vec<usize> = (1usize..(1 << self.k))
            .filter(|m| m & (1 << i) != 0)
            .collect();
        let f_inc = |x: f64| {
            masks
                .iter()
                .map(|&m| {
                    let base = sums[m] - beta[i] * s_i;
                    0.5 * (1.0 + base + x * s_i).log2() - self.rate_sums[m]
                })
                .fold(f64::INFINITY, f64::min)
        };
        let g_dec = |x: f64| self.snr.energy_max_with(&split, i, x) - self.target_b;

        if f_inc(1.0) <= g_dec(1.0) {
            return 1.0;
        }
        if g_dec(0.0) <= f_inc(0.0) {
            return 0.0;
        }
        // f - g is non-decreasing, negative at 0 and positive at 1.
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f_inc(mid) - g_dec(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let m_lo = f_inc(lo).min(g_dec(lo));
        let m_hi = f_inc(hi).min(g_dec(hi));
        if m_lo >= m_hi {
            lo
        } else {
            hi
        }
    }

    fn refine(&self, beta: &mut [f64], max_passes: usize) -> f64 {
        let mut best = self.margin(beta);
        for _ in 0..max_passes {
            let mut improved = false;
            for i in 0..self.k {
                let candidate = self.optimize_coord(beta, i);
                let old = beta[i];
                beta[i] = candidate;
                let m = self.margin(beta);
                if m > best + 1e-15 {
                    best = m;
                    improved = true;
                } else {
                    beta[i] = old;
                }
            }
            if !improved {
                break;
            }
        }
        best
    }
}

fn linspace(n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![1.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

/// Decides whether `pt` lies in the capacity region for demand `b`,
/// returning a witness split when it does.
///
/// The witness re-evaluates to a feasible split within `grid.tol`; a `None`
/// is accurate up to the grid resolution.
pub fn capacity_contains(
    snr: &SnrTable,
    b: f64,
    pt: &RateTuple,
    grid: &GridSpec,
) -> Result<Option<PowerSplit>> {
    let k = snr.k();
    assert_eq!(pt.rates().len(), k, "rate tuple length must match K");
    assert!(
        k <= 16,
        "subset constraints are enumerated; K <= 16 supported"
    );
    if b < 0.0 {
        return Err(Error::NegativeDemand(b));
    }
    let b_coop = snr.b_coop();
    let tol = grid.tol;
    if b > b_coop + tol {
        return Err(Error::InfeasibleDemand { b, b_coop });
    }
    if pt.b_rate() < b - tol || pt.b_rate() > b_coop + tol {
        return Ok(None);
    }

    let eval = MarginEval::new(snr, pt);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |beta: Vec<f64>| -> Option<PowerSplit> {
        let m = eval.margin(&beta);
        if m >= -tol {
            return Some(PowerSplit::new(beta).unwrap());
        }
        if best.as_ref().is_none_or(|(bm, _)| m > *bm) {
            best = Some((m, beta));
        }
        None
    };

    // The all-ones split maximizes every rate bound; it settles any point
    // whose energy rate does not exceed b_ind.
    if let Some(w) = consider(vec![1.0; k]) {
        return Ok(Some(w));
    }

    if grid.refine {
        // Analytic candidates: splits that reproduce the rates exactly as
        // SUD rates or as dominant-face corners (SIC rates), with
        // rate-unconstrained coordinates spent on energy.
        let mut analytic: Vec<rates::PartialSplit> = Vec::new();
        if let Some(p) = rates::invert_sud(snr.snr1(), pt.rates(), tol) {
            analytic.push(p);
        }
        if k <= 6 {
            for order in rates::permutations(k) {
                if let Some(p) = rates::invert_sic(snr.snr1(), pt.rates(), &order, tol) {
                    analytic.push(p);
                }
            }
        }
        for partial in analytic {
            let beta: Vec<f64> = partial.iter().map(|x| x.unwrap_or(0.0)).collect();
            if let Some(w) = consider(beta) {
                return Ok(Some(w));
            }
        }
    }

    // Raw grid sweep.
    let axis = linspace(grid.points_per_axis);
    if !axis.is_empty() {
        let mut idx = vec![0usize; k];
        loop {
            let beta: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
            if let Some(w) = consider(beta) {
                return Ok(Some(w));
            }
            let mut carry = 0;
            while carry < k {
                idx[carry] += 1;
                if idx[carry] < axis.len() {
                    break;
                }
                idx[carry] = 0;
                carry += 1;
            }
            if carry == k {
                break;
            }
        }
    }

    if grid.refine {
        // Splits on the manifold E(beta) = B: natural witnesses whenever
        // the energy constraint is the binding one.
        for w in direction_grid(k, grid.manifold_dirs) {
            if let Ok(split) = directional_split_for_demand(snr, pt.b_rate().max(0.0), &w) {
                if let Some(found) = consider(split.into_vec()) {
                    return Ok(Some(found));
                }
            }
        }

        if let Some((_, mut beta)) = best.take() {
            if eval.refine(&mut beta, 8) >= -tol {
                return Ok(Some(PowerSplit::new(beta).unwrap()));
            }
        }
    }
    Ok(None)
}

/// One sampled point of the region boundary: the split, the corner rates it
/// supports and the top of its energy window.
#[derive(Debug, Clone, Serialize)]
pub struct BoundarySample {
    pub beta: PowerSplit,
    pub point: RateTuple,
}

/// Samples the outer boundary of the capacity region for plotting: for each
/// split on an `n_samples`-per-axis grid with `E(beta) >= b`, emits the
/// dominant-face corner points (one per decoding order, deduplicated) at
/// the maximal energy rate `B = E(beta)`.
///
/// Supported for K = 2 and K = 3 only; membership itself has no such limit.
pub fn region_boundary_samples(
    snr: &SnrTable,
    b: f64,
    n_samples: usize,
) -> Result<Vec<BoundarySample>> {
    let k = snr.k();
    if k > 3 {
        return Err(Error::UnsupportedK(k));
    }
    if b < 0.0 {
        return Err(Error::NegativeDemand(b));
    }
    let b_coop = snr.b_coop();
    if b > b_coop + DEFAULT_TOL {
        return Err(Error::InfeasibleDemand { b, b_coop });
    }
    let axis = linspace(n_samples);
    let orders = rates::permutations(k);
    let mut out = Vec::new();
    if axis.is_empty() {
        return Ok(out);
    }
    let mut idx = vec![0usize; k];
    loop {
        let beta: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
        let split = PowerSplit::new(beta).unwrap();
        let e = snr.energy_max(&split);
        if e >= b - DEFAULT_TOL {
            let mut corners: Vec<Vec<f64>> = Vec::new();
            for order in &orders {
                let r = rates::sic_rates(snr.snr1(), split.beta(), order);
                if !corners
                    .iter()
                    .any(|c| c.iter().zip(&r).all(|(a, b)| (a - b).abs() <= 1e-12))
                {
                    corners.push(r);
                }
            }
            for r in corners {
                out.push(BoundarySample {
                    beta: split.clone(),
                    point: RateTuple::new(r, e)?,
                });
            }
        }
        let mut carry = 0;
        while carry < k {
            idx[carry] += 1;
            if idx[carry] < axis.len() {
                break;
            }
            idx[carry] = 0;
            carry += 1;
        }
        if carry == k {
            break;
        }
    }
    Ok(out)
}

/// Renders boundary samples as CSV with header
/// `beta_1,...,beta_K,R_1,...,R_K,B`.
pub fn boundary_csv(samples: &[BoundarySample], k: usize) -> String {
    let mut out = String::new();
    for i in 1..=k {
        out.push_str(&format!("beta_{i},"));
    }
    for i in 1..=k {
        out.push_str(&format!("R_{i},"));
    }
    out.push_str("B\n");
    for s in samples {
        for v in s.beta.beta() {
            out.push_str(&format!("{v},"));
        }
        for v in s.point.rates() {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!("{}\n", s.point.b_rate()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const HALF_LOG2_21: f64 = 2.19615871138938;
    const SIC_FIRST: f64 = 0.466442902070732; // 1/2 log2(21/11)
    const SIC_LAST: f64 = 1.729715809318649; // 1/2 log2(11)

    fn snr() -> SnrTable {
        SnrTable::symmetric(2, 10.0).unwrap()
    }

    #[test]
    fn sum_rate_bound_examples() {
        let full = PowerSplit::full_information(2);
        let b = sum_rate_bound(&snr(), &full, &[0, 1]).unwrap();
        assert!((b - HALF_LOG2_21).abs() < 1e-12);

        let zero = PowerSplit::full_energy(2);
        assert_eq!(sum_rate_bound(&snr(), &zero, &[0, 1]).unwrap(), 0.0);

        let split = PowerSplit::new(vec![0.615, 0.615]).unwrap();
        let single = sum_rate_bound(&snr(), &split, &[0]).unwrap();
        assert!((single - 0.5 * 7.15f64.log2()).abs() < 1e-12);

        assert!(matches!(
            sum_rate_bound(&snr(), &full, &[]),
            Err(Error::EmptySubset)
        ));
    }

    #[test]
    fn membership_accepts_sic_corner() {
        let pt = RateTuple::new(vec![SIC_FIRST, SIC_LAST], 21.0).unwrap();
        let witness = capacity_contains(&snr(), 0.0, &pt, &GridSpec::for_k(2))
            .unwrap()
            .expect("corner point belongs to the region");
        // Witness must satisfy the constraints it certifies.
        let bound = sum_rate_bound(&snr(), &witness, &[0, 1]).unwrap();
        assert!(pt.sum_rate() <= bound + DEFAULT_TOL);
        assert!(pt.b_rate() <= snr().energy_max(&witness) + DEFAULT_TOL);
    }

    #[test]
    fn membership_accepts_noise_floor_point() {
        let pt = RateTuple::new(vec![0.0, 0.0], 1.0).unwrap();
        assert!(capacity_contains(&snr(), 0.0, &pt, &GridSpec::for_k(2))
            .unwrap()
            .is_some());
    }

    #[test]
    fn membership_rejects_excess_sum_rate() {
        let pt = RateTuple::new(vec![1.15, 1.15], 1.0).unwrap(); // sum 2.3 > 1/2 log2(21)
        assert!(capacity_contains(&snr(), 0.0, &pt, &GridSpec::for_k(2))
            .unwrap()
            .is_none());
    }

    #[test]
    fn membership_rejects_energy_above_window() {
        let pt = RateTuple::new(vec![0.0, 0.0], 41.5).unwrap();
        assert!(capacity_contains(&snr(), 0.0, &pt, &GridSpec::for_k(2))
            .unwrap()
            .is_none());
        let pt = RateTuple::new(vec![0.0, 0.0], 5.0).unwrap();
        assert!(capacity_contains(&snr(), 10.0, &pt, &GridSpec::for_k(2))
            .unwrap()
            .is_none());
    }

    #[test]
    fn membership_infeasible_demand_errors() {
        let pt = RateTuple::new(vec![0.0, 0.0], 1.0).unwrap();
        assert!(matches!(
            capacity_contains(&snr(), 50.0, &pt, &GridSpec::for_k(2)),
            Err(Error::InfeasibleDemand { .. })
        ));
    }

    #[test]
    fn boundary_contains_both_sic_corners() {
        let samples = region_boundary_samples(&snr(), 0.0, 5).unwrap();
        let want = [
            (vec![SIC_FIRST, SIC_LAST], 21.0),
            (vec![SIC_LAST, SIC_FIRST], 21.0),
        ];
        for (r, b) in &want {
            assert!(
                samples.iter().any(|s| s.point.b_rate() == *b
                    && s.point
                        .rates()
                        .iter()
                        .zip(r)
                        .all(|(a, e)| (a - e).abs() < 1e-9)),
                "missing corner {r:?}"
            );
        }
        // Full-energy split collapses to the single point (0, 0, 41).
        let zero: Vec<_> = samples
            .iter()
            .filter(|s| s.beta.beta() == [0.0, 0.0])
            .collect();
        assert_eq!(zero.len(), 1);
        assert!((zero[0].point.b_rate() - 41.0).abs() < 1e-12);
        assert_eq!(zero[0].point.rates(), &[0.0, 0.0]);
    }

    #[test]
    fn boundary_empty_and_unsupported() {
        assert!(region_boundary_samples(&snr(), 0.0, 0).unwrap().is_empty());
        let snr4 = SnrTable::symmetric(4, 1.0).unwrap();
        assert!(matches!(
            region_boundary_samples(&snr4, 0.0, 3),
            Err(Error::UnsupportedK(4))
        ));
    }

    #[test]
    fn boundary_respects_demand() {
        // At b = 28.7 splits with E(beta) < b contribute nothing.
        let samples = region_boundary_samples(&snr(), 28.7, 9).unwrap();
        assert!(!samples.is_empty());
        for s in &samples {
            assert!(s.point.b_rate() >= 28.7 - DEFAULT_TOL);
        }
    }

    #[test]
    fn boundary_three_users_emits_all_corners() {
        let snr3 = SnrTable::symmetric(3, 10.0).unwrap();
        let samples = region_boundary_samples(&snr3, 0.0, 3).unwrap();
        // At the all-ones split the dominant face has 3! distinct corners.
        let full: Vec<_> = samples
            .iter()
            .filter(|s| s.beta.beta() == [1.0, 1.0, 1.0])
            .collect();
        assert_eq!(full.len(), 6);
        for s in &full {
            assert_eq!(s.point.b_rate(), snr3.b_ind());
            let sum = s.point.sum_rate();
            assert!((sum - 0.5 * 31f64.log2()).abs() < 1e-9);
        }
    }

    #[test]
    fn csv_round_trip_header() {
        let samples = region_boundary_samples(&snr(), 0.0, 3).unwrap();
        let csv = boundary_csv(&samples, 2);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "beta_1,beta_2,R_1,R_2,B");
        let first = lines.next().unwrap();
        let fields: Vec<f64> = first.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(fields.len(), 5);
    }
}
