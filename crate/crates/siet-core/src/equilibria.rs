//! Eta-Nash-equilibrium information-energy regions of the decentralized
//! game: each transmitter unilaterally tunes its own power split to
//! maximize its own information rate while the coalition keeps the
//! harvester above the energy demand `b`.
//!
//! Two regimes fall out of the equilibrium analysis:
//!
//! * `b <= b_ind`: the energy constraint is vacuous, every user spends its
//!   full budget on information (`beta = 1`), and the rates are pinned to
//!   the SUD (resp. SIC) formulas at the all-ones split.
//! * `b_ind < b <= b_coop`: equilibria live exactly on the manifold
//!   `E(beta) = b` and the delivered energy rate equals `b`, since any slack
//!   would let some user grow its own split and rate.
//!
//! Deviations only need to be searched over the per-user split interval
//! `beta_i in [0, 1]`: at any equilibrium the inputs are max-power i.i.d.
//! Gaussian and the non-information component carries receiver-known
//! common randomness, so anything else is dominated. The best response of
//! a user is therefore the largest own split that keeps `E(beta)` above
//! the demand, which is found by bisection.

use serde::Serialize;

use crate::bisect::bisect_non_increasing;
use crate::error::{Error, Result};
use crate::hull;
use crate::manifold::direction_grid;
pub use crate::manifold::{directional_split_for_demand, uniform_split_for_demand};
use crate::model::{PowerSplit, SnrTable, DEFAULT_TOL};
use crate::rates;
use crate::regions::RateTuple;

/// A receiver configuration fixed for the whole game.
#[derive(Debug, Clone, PartialEq)]
pub enum AtomicDecoder {
    /// Single-user decoding: every other user is treated as noise.
    Sud,
    /// Successive interference cancellation with a 0-based decoding order;
    /// `order[0]` is decoded first and sees everyone else as interference.
    Sic(Vec<usize>),
}

impl AtomicDecoder {
    pub fn validate(&self, k: usize) -> Result<()> {
        if let AtomicDecoder::Sic(order) = self {
            let mut seen = vec![false; k];
            if order.len() != k {
                return Err(Error::BadPermutation { k });
            }
            for &u in order {
                if u >= k || seen[u] {
                    return Err(Error::BadPermutation { k });
                }
                seen[u] = true;
            }
        }
        Ok(())
    }

    fn rates(&self, snr: &SnrTable, split: &PowerSplit) -> Vec<f64> {
        match self {
            AtomicDecoder::Sud => rates::sud_rates(snr.snr1(), split.beta()),
            AtomicDecoder::Sic(order) => rates::sic_rates(snr.snr1(), split.beta(), order),
        }
    }

    /// Label used in CSV cells and JSON records, e.g. `sud` or `sic:2-1`
    /// (1-based decoding order).
    pub fn label(&self) -> String {
        match self {
            AtomicDecoder::Sud => "sud".to_string(),
            AtomicDecoder::Sic(order) => {
                let parts: Vec<String> = order.iter().map(|u| (u + 1).to_string()).collect();
                format!("sic:{}", parts.join("-"))
            }
        }
    }
}

/// Receiver specification: a fixed atomic decoder or a time-sharing mixture.
#[derive(Debug, Clone, PartialEq)]
pub enum DecoderSpec {
    Atomic(AtomicDecoder),
    /// Time sharing across atomic decoders; weights are non-negative and
    /// sum to 1.
    TimeShare(Vec<(AtomicDecoder, f64)>),
}

impl DecoderSpec {
    pub fn sud() -> Self {
        DecoderSpec::Atomic(AtomicDecoder::Sud)
    }

    pub fn sic(order: Vec<usize>) -> Self {
        DecoderSpec::Atomic(AtomicDecoder::Sic(order))
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        match self {
            DecoderSpec::Atomic(a) => a.validate(k),
            DecoderSpec::TimeShare(mix) => {
                let sum: f64 = mix.iter().map(|(_, w)| w).sum();
                if mix.is_empty()
                    || mix.iter().any(|(_, w)| *w < 0.0)
                    || (sum - 1.0).abs() > DEFAULT_TOL
                {
                    return Err(Error::InvalidMixture { sum });
                }
                mix.iter().try_for_each(|(a, _)| a.validate(k))
            }
        }
    }

    fn atomic(&self) -> Result<&AtomicDecoder> {
        match self {
            DecoderSpec::Atomic(a) => Ok(a),
            DecoderSpec::TimeShare(_) => Err(Error::DecoderNotAtomic),
        }
    }
}

/// Game parameters: the energy demand and the equilibrium slack.
#[derive(Debug, Clone, Copy)]
pub struct GameParams {
    pub b: f64,
    pub eta: f64,
}

impl GameParams {
    /// `b >= 0`, `eta > 0`.
    pub fn new(b: f64, eta: f64) -> Result<Self> {
        if b < 0.0 {
            return Err(Error::NegativeDemand(b));
        }
        if eta <= 0.0 || eta.is_nan() {
            return Err(Error::BadGame("eta must be strictly positive"));
        }
        Ok(Self { b, eta })
    }
}

/// A candidate equilibrium: the split, the rate tuple it claims and the
/// decoder in force.
#[derive(Debug, Clone)]
pub struct EquilibriumPoint {
    pub split: PowerSplit,
    pub rates: RateTuple,
    pub decoder: AtomicDecoder,
}

/// Per-user SUD rates at a split: `R_i = 1/2 log2(1 + beta_i SNR_1i /
/// (1 + sum_{j != i} beta_j SNR_1j))`.
pub fn ne_rates_sud(snr: &SnrTable, split: &PowerSplit) -> Vec<f64> {
    assert_eq!(split.len(), snr.k());
    rates::sud_rates(snr.snr1(), split.beta())
}

/// Per-user SIC rates for decoding order `order` (0-based, first decoded
/// first): the user decoded at stage `i` sees stages `i+1..` as
/// interference, the last one none.
pub fn ne_rates_sic(snr: &SnrTable, split: &PowerSplit, order: &[usize]) -> Result<Vec<f64>> {
    assert_eq!(split.len(), snr.k());
    AtomicDecoder::Sic(order.to_vec()).validate(snr.k())?;
    Ok(rates::sic_rates(snr.snr1(), split.beta(), order))
}

/// Largest own split `beta_i` that keeps the coalition above the energy
/// demand, the other users' splits held fixed. The own rate is strictly
/// increasing in the own split under both SUD and SIC, and `E` is
/// non-increasing in it, so this is the utility-maximizing deviation.
pub fn best_response(
    snr: &SnrTable,
    params: &GameParams,
    split: &PowerSplit,
    user: usize,
    decoder: &DecoderSpec,
) -> Result<f64> {
    decoder.atomic()?;
    assert!(user < snr.k());
    let e_at = |x: f64| snr.energy_max_with(split, user, x);
    // Slack of a few ulps so splits sitting exactly on the feasibility
    // boundary (solver outputs) are not rejected by rounding noise.
    let slack = 1e-12 * params.b.abs().max(1.0);
    if e_at(1.0) >= params.b - slack {
        return Ok(1.0);
    }
    if e_at(0.0) < params.b - slack {
        return Err(Error::NoFeasibleResponse { user });
    }
    Ok(bisect_non_increasing(0.0, 1.0, params.b, e_at))
}

/// Why a candidate point failed the equilibrium check.
#[derive(Debug, Clone, PartialEq)]
pub enum NeFailure {
    /// The split cannot deliver the demand at all: an outage profile.
    EnergyShortfall { required: f64, available: f64 },
    /// The claimed energy rate is outside `[b, E(beta)]`.
    EnergyRateOutOfWindow { b_rate: f64, lo: f64, hi: f64 },
    /// The claimed rates are not the decoder rates of the split.
    RateMismatch {
        user: usize,
        stated: f64,
        actual: f64,
    },
    /// Some user can improve its rate by more than eta.
    ImprovableBy { user: usize, gain: f64 },
    /// Some user has no feasible response given the others' splits.
    NoFeasibleResponse { user: usize },
}

/// Outcome of the equilibrium check, with the deviation gains found.
#[derive(Debug, Clone)]
pub struct NeReport {
    pub is_equilibrium: bool,
    pub max_gain: f64,
    pub per_user_gain: Vec<f64>,
    pub failure: Option<NeFailure>,
}

impl NeReport {
    fn fail(failure: NeFailure, gains: Vec<f64>) -> Self {
        let max_gain = gains.iter().cloned().fold(0.0, f64::max);
        NeReport {
            is_equilibrium: false,
            max_gain,
            per_user_gain: gains,
            failure: Some(failure),
        }
    }
}

/// Checks whether `point` is an eta-Nash equilibrium: no user can gain
/// more than `params.eta` bits per channel use by a unilateral deviation,
/// and the energy window holds. Ties within `tol` count as no improvement.
pub fn is_eta_ne(
    snr: &SnrTable,
    params: &GameParams,
    point: &EquilibriumPoint,
    tol: f64,
) -> Result<NeReport> {
    let k = snr.k();
    point.decoder.validate(k)?;
    assert_eq!(point.split.len(), k);
    let decoder = DecoderSpec::Atomic(point.decoder.clone());

    let available = snr.energy_max(&point.split);
    if available < params.b - tol {
        return Ok(NeReport::fail(
            NeFailure::EnergyShortfall {
                required: params.b,
                available,
            },
            vec![0.0; k],
        ));
    }
    let b_rate = point.rates.b_rate();
    if b_rate < params.b - tol || b_rate > available + tol {
        return Ok(NeReport::fail(
            NeFailure::EnergyRateOutOfWindow {
                b_rate,
                lo: params.b,
                hi: available,
            },
            vec![0.0; k],
        ));
    }
    let actual = point.decoder.rates(snr, &point.split);
    for (user, (&stated, &act)) in point.rates.rates().iter().zip(&actual).enumerate() {
        if (stated - act).abs() > tol {
            return Ok(NeReport::fail(
                NeFailure::RateMismatch {
                    user,
                    stated,
                    actual: act,
                },
                vec![0.0; k],
            ));
        }
    }

    let mut gains = vec![0.0; k];
    for user in 0..k {
        match best_response(snr, params, &point.split, user, &decoder) {
            Ok(response) => {
                let mut deviated = point.split.clone();
                deviated.set(user, response);
                let new_rate = point.decoder.rates(snr, &deviated)[user];
                gains[user] = new_rate - actual[user];
            }
            Err(Error::NoFeasibleResponse { user }) => {
                return Ok(NeReport::fail(
                    NeFailure::NoFeasibleResponse { user },
                    gains,
                ));
            }
            Err(e) => return Err(e),
        }
    }
    let max_gain = gains.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max_gain > params.eta + tol {
        let user = gains
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();
        return Ok(NeReport::fail(
            NeFailure::ImprovableBy {
                user,
                gain: max_gain,
            },
            gains,
        ));
    }
    Ok(NeReport {
        is_equilibrium: true,
        max_gain,
        per_user_gain: gains,
        failure: None,
    })
}

/// Fills the coordinates of a partially determined split (users whose
/// receiver SNR is zero, hence rate-unconstrained) so that the energy
/// surface meets `b`, if possible. Free coordinates move together along a
/// shared scalar.
fn complete_split_on_manifold(
    snr: &SnrTable,
    partial: &rates::PartialSplit,
    b: f64,
    tol: f64,
) -> Option<PowerSplit> {
    // sqrt(1 - beta) has unbounded slope at the clamp boundary, so one ulp
    // of inversion noise below 1 inflates the energy by orders more than
    // the rate tolerance warrants. Coordinates within tol of 1 are rate-
    // indistinguishable from 1 and get snapped there.
    let partial: rates::PartialSplit = partial
        .iter()
        .map(|x| x.map(|v| if v >= 1.0 - tol { 1.0 } else { v }))
        .collect();
    let fill = |t: f64| {
        PowerSplit::new(
            partial
                .iter()
                .map(|x| x.unwrap_or(t).clamp(0.0, 1.0))
                .collect(),
        )
        .unwrap()
    };
    let free = partial.iter().filter(|x| x.is_none()).count();
    let energy_tol = tol * b.abs().max(1.0);
    if free == 0 {
        let split = fill(0.0);
        return ((snr.energy_max(&split) - b).abs() <= energy_tol).then_some(split);
    }
    let (hi, lo) = (snr.energy_max(&fill(0.0)), snr.energy_max(&fill(1.0)));
    if b > hi + energy_tol || b < lo - energy_tol {
        return None;
    }
    let t = bisect_non_increasing(0.0, 1.0, b, |t| snr.energy_max(&fill(t)));
    let split = fill(t);
    ((snr.energy_max(&split) - b).abs() <= energy_tol).then_some(split)
}

/// Number of sampled points per component region used for time-sharing
/// (convex hull) membership.
pub const DEFAULT_COMPONENT_SAMPLES: usize = 256;

/// A sampled member of one component equilibrium region.
#[derive(Debug, Clone)]
pub struct EquilibriumSample {
    pub decoder: AtomicDecoder,
    pub split: PowerSplit,
    pub point: RateTuple,
}

/// Samples the equilibrium region of a single decoder.
///
/// For `b <= b_ind` this is the fixed all-ones rate point with the energy
/// rate swept over `[b, b_ind]`; beyond that, one manifold point per
/// direction of a weight sweep, all delivering exactly `b`.
pub fn ne_component_samples(
    snr: &SnrTable,
    params: &GameParams,
    decoder: &AtomicDecoder,
    n: usize,
) -> Result<Vec<EquilibriumSample>> {
    decoder.validate(snr.k())?;
    let b_coop = snr.b_coop();
    if params.b > b_coop + DEFAULT_TOL {
        return Err(Error::InfeasibleDemand {
            b: params.b,
            b_coop,
        });
    }
    let mut out = Vec::new();
    if n == 0 {
        return Ok(out);
    }
    let b_ind = snr.b_ind();
    if params.b <= b_ind {
        let split = PowerSplit::full_information(snr.k());
        let r = decoder.rates(snr, &split);
        for i in 0..n {
            let frac = if n == 1 {
                1.0
            } else {
                i as f64 / (n - 1) as f64
            };
            let b_rate = params.b + frac * (b_ind - params.b);
            out.push(EquilibriumSample {
                decoder: decoder.clone(),
                split: split.clone(),
                point: RateTuple::new(r.clone(), b_rate)?,
            });
        }
    } else {
        let k = snr.k();
        // Pick the per-axis direction count so the sweep lands near n.
        let m = if k == 2 {
            (n / 2).max(1)
        } else {
            let mut m = 1usize;
            while k * (m + 1).pow((k - 1) as u32) <= n {
                m += 1;
            }
            m
        };
        for w in direction_grid(k, m) {
            let split = directional_split_for_demand(snr, params.b, &w)?;
            let r = decoder.rates(snr, &split);
            out.push(EquilibriumSample {
                decoder: decoder.clone(),
                split,
                point: RateTuple::new(r, params.b)?,
            });
        }
    }
    Ok(out)
}

/// All atomic components of the time-sharing region: SUD plus SIC for
/// every decoding order.
pub fn all_atomic_decoders(k: usize) -> Vec<AtomicDecoder> {
    let mut out = vec![AtomicDecoder::Sud];
    out.extend(rates::permutations(k).into_iter().map(AtomicDecoder::Sic));
    out
}

/// Decides membership of `pt` in the eta-NE region of the given decoder.
///
/// SUD and SIC are decided exactly by inverting the rate map back to the
/// split and checking the regime conditions; time sharing is decided
/// against the convex hull of sampled component points (approximate from
/// below).
pub fn ne_region_contains(
    snr: &SnrTable,
    params: &GameParams,
    pt: &RateTuple,
    decoder: &DecoderSpec,
    tol: f64,
) -> Result<bool> {
    let k = snr.k();
    assert_eq!(pt.rates().len(), k);
    decoder.validate(k)?;
    let b_coop = snr.b_coop();
    if params.b > b_coop + tol {
        return Err(Error::InfeasibleDemand {
            b: params.b,
            b_coop,
        });
    }
    if pt.b_rate() < params.b - tol {
        return Ok(false);
    }
    let b_ind = snr.b_ind();

    match decoder {
        DecoderSpec::Atomic(atom) => {
            if params.b <= b_ind {
                // Vacuous regime: the all-ones split is the only equilibrium
                // profile; rates are pinned and B ranges up to b_ind.
                let split = PowerSplit::full_information(k);
                let expected = atom.rates(snr, &split);
                let rates_match = pt
                    .rates()
                    .iter()
                    .zip(&expected)
                    .all(|(a, e)| (a - e).abs() <= tol);
                Ok(rates_match && pt.b_rate() <= b_ind + tol)
            } else {
                // Binding regime: B = b exactly and the split solves
                // E(beta) = b while reproducing the rates.
                if (pt.b_rate() - params.b).abs() > tol {
                    return Ok(false);
                }
                let partial = match atom {
                    AtomicDecoder::Sud => rates::invert_sud(snr.snr1(), pt.rates(), tol),
                    AtomicDecoder::Sic(order) => {
                        rates::invert_sic(snr.snr1(), pt.rates(), order, tol)
                    }
                };
                let Some(partial) = partial else {
                    return Ok(false);
                };
                Ok(complete_split_on_manifold(snr, &partial, params.b, tol).is_some())
            }
        }
        DecoderSpec::TimeShare(_) => {
            if k > 6 {
                return Err(Error::UnsupportedK(k));
            }
            let mut points = Vec::new();
            for atom in all_atomic_decoders(k) {
                for s in ne_component_samples(snr, params, &atom, DEFAULT_COMPONENT_SAMPLES)? {
                    let mut coords = s.point.rates().to_vec();
                    coords.push(s.point.b_rate());
                    points.push(coords);
                }
            }
            let mut target = pt.rates().to_vec();
            target.push(pt.b_rate());
            Ok(hull::contains(&points, &target, tol * b_coop.max(1.0)))
        }
    }
}

/// Trace of sequential round-robin best-response play.
#[derive(Debug, Clone)]
pub struct DynamicsResult {
    /// Profile after each round; the first entry is the start.
    pub trajectory: Vec<PowerSplit>,
    pub converged: bool,
    pub rounds: usize,
}

const DYNAMICS_EPS: f64 = 1e-9;

/// Round-robin best-response dynamics from `start`: users update in index
/// order, one full round per trajectory entry, until the largest
/// coordinate change in a round drops below 1e-9 or `max_rounds` is hit.
pub fn best_response_dynamics(
    snr: &SnrTable,
    params: &GameParams,
    decoder: &DecoderSpec,
    start: PowerSplit,
    max_rounds: usize,
) -> Result<DynamicsResult> {
    decoder.atomic()?;
    assert_eq!(start.len(), snr.k());
    let mut current = start.clone();
    let mut trajectory = vec![start];
    for round in 1..=max_rounds {
        let mut delta: f64 = 0.0;
        for user in 0..snr.k() {
            let response = match best_response(snr, params, &current, user, decoder) {
                Ok(r) => r,
                Err(Error::NoFeasibleResponse { user }) => {
                    return Err(Error::DynamicsInfeasible { round, user });
                }
                Err(e) => return Err(e),
            };
            delta = delta.max((response - current.beta()[user]).abs());
            current.set(user, response);
        }
        trajectory.push(current.clone());
        if delta < DYNAMICS_EPS {
            return Ok(DynamicsResult {
                trajectory,
                converged: true,
                rounds: round,
            });
        }
    }
    Ok(DynamicsResult {
        trajectory,
        converged: false,
        rounds: max_rounds,
    })
}

/// JSON record for an equilibrium point:
/// `{decoder, order?, beta, rates, B, eta, b}`.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumRecord {
    pub decoder: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<usize>>,
    pub beta: Vec<f64>,
    pub rates: Vec<f64>,
    #[serde(rename = "B")]
    pub b_rate: f64,
    pub eta: f64,
    pub b: f64,
}

impl EquilibriumRecord {
    pub fn new(point: &EquilibriumPoint, params: &GameParams) -> Self {
        let (decoder, order) = match &point.decoder {
            AtomicDecoder::Sud => ("sud", None),
            // 1-based in exported records
            AtomicDecoder::Sic(o) => ("sic", Some(o.iter().map(|u| u + 1).collect())),
        };
        EquilibriumRecord {
            decoder,
            order,
            beta: point.split.beta().to_vec(),
            rates: point.rates.rates().to_vec(),
            b_rate: point.rates.b_rate(),
            eta: params.eta,
            b: params.b,
        }
    }
}

/// Renders equilibrium samples as CSV with header
/// `decoder,beta_1..beta_K,R_1..R_K,B`.
pub fn ne_csv(samples: &[EquilibriumSample], k: usize) -> String {
    let mut out = String::from("decoder,");
    for i in 1..=k {
        out.push_str(&format!("beta_{i},"));
    }
    for i in 1..=k {
        out.push_str(&format!("R_{i},"));
    }
    out.push_str("B\n");
    for s in samples {
        out.push_str(&s.decoder.label());
        out.push(',');
        for v in s.split.beta() {
            out.push_str(&format!("{v},"));
        }
        for v in s.point.rates() {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!("{}\n", s.point.b_rate()));
    }
    out
}
