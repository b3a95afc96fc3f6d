//! Browser bindings for the two-user information-energy region explorer.
//!
//! Three operations back the demo page: the rate-plane scene for a chosen
//! energy demand (capacity frontier, equilibrium points and their
//! time-sharing hull), the BSC trade-off curve, and a best-response
//! dynamics trace. All of them take plain numbers and hand back JSON for
//! the canvas code.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use siet_core::equilibria::{
    best_response_dynamics, directional_split_for_demand, is_eta_ne, ne_rates_sic, ne_rates_sud,
    uniform_split_for_demand, AtomicDecoder, DecoderSpec, EquilibriumPoint, GameParams,
};
use siet_core::{Error, PowerSplit, RateTuple, SnrTable, DEFAULT_TOL};

#[derive(Serialize)]
struct RegionScene {
    b: f64,
    b_ind: f64,
    b_coop: f64,
    binding: bool,
    /// Outer boundary of the achievable (R1, R2) set at demand b.
    frontier: Vec<[f64; 2]>,
    sud_point: [f64; 2],
    sic_points: [[f64; 2]; 2],
    /// Equilibrium curves over the manifold sweep (empty when vacuous).
    sud_curve: Vec<[f64; 2]>,
    sic_curves: [Vec<[f64; 2]>; 2],
    /// Convex hull of the equilibrium points: the time-sharing region.
    hull: Vec<[f64; 2]>,
}

fn snr_k2(s11: f64, s12: f64, s21: f64, s22: f64) -> Result<SnrTable, String> {
    SnrTable::new(vec![s11, s12], vec![s21, s22]).map_err(|e| e.to_string())
}

/// Pentagon bounds at a split: per-user caps and the sum cap.
fn caps(snr: &SnrTable, split: &PowerSplit) -> (f64, f64, f64) {
    let s1 = split.beta()[0] * snr.snr1()[0];
    let s2 = split.beta()[1] * snr.snr1()[1];
    (
        0.5 * (1.0 + s1).log2(),
        0.5 * (1.0 + s2).log2(),
        0.5 * (1.0 + s1 + s2).log2(),
    )
}

/// Splits meeting the demand with extreme rate trade-offs: a direction
/// sweep across the manifold (or just the all-ones split when vacuous).
fn feasible_splits(snr: &SnrTable, b: f64, n_per_side: usize) -> Vec<PowerSplit> {
    if b <= snr.b_ind() {
        return vec![PowerSplit::full_information(2)];
    }
    let mut out = Vec::new();
    for i in 0..=n_per_side {
        let v = (i as f64 / n_per_side as f64).max(1e-3);
        for w in [[1.0, v], [v, 1.0]] {
            if let Ok(split) = directional_split_for_demand(snr, b, &w) {
                out.push(split);
            }
        }
    }
    out
}

/// Upper-right frontier of the union of pentagons over the feasible splits.
fn frontier(snr: &SnrTable, splits: &[PowerSplit], n: usize) -> Vec<[f64; 2]> {
    let r1_max = splits.iter().map(|s| caps(snr, s).0).fold(0.0f64, f64::max);
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let r1 = r1_max * i as f64 / n as f64;
        let mut r2_best = f64::NEG_INFINITY;
        for split in splits {
            let (a1, a2, a12) = caps(snr, split);
            if r1 <= a1 + 1e-12 {
                r2_best = r2_best.max(a2.min(a12 - r1));
            }
        }
        if r2_best >= 0.0 {
            out.push([r1, r2_best]);
        }
    }
    out
}

/// Andrew monotone chain; returns the hull as a closed polygon.
fn convex_hull_2d(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let chain = |iter: &mut dyn Iterator<Item = [f64; 2]>| {
        let mut half: Vec<[f64; 2]> = Vec::new();
        for p in iter {
            while half.len() >= 2 && cross(half[half.len() - 2], half[half.len() - 1], p) <= 1e-15 {
                half.pop();
            }
            half.push(p);
        }
        half.pop();
        half
    };
    let mut hull = chain(&mut pts.iter().copied());
    hull.extend(chain(&mut pts.iter().rev().copied()));
    hull
}

fn region_scene_impl(s11: f64, s12: f64, s21: f64, s22: f64, b: f64) -> Result<String, String> {
    let snr = snr_k2(s11, s12, s21, s22)?;
    let (b_ind, b_coop) = (snr.b_ind(), snr.b_coop());
    if !snr.is_feasible(b, DEFAULT_TOL).map_err(|e| e.to_string())? {
        return Err(Error::InfeasibleDemand { b, b_coop }.to_string());
    }
    let binding = b > b_ind;
    let splits = feasible_splits(&snr, b, 128);
    let star = uniform_split_for_demand(&snr, b).map_err(|e| e.to_string())?;

    let rates_at = |split: &PowerSplit| {
        let sud = ne_rates_sud(&snr, split);
        let s12r = ne_rates_sic(&snr, split, &[0, 1]).unwrap();
        let s21r = ne_rates_sic(&snr, split, &[1, 0]).unwrap();
        (sud, s12r, s21r)
    };
    let (sud_star, sic12_star, sic21_star) = rates_at(&star);

    let mut sud_curve = Vec::new();
    let mut sic12_curve = Vec::new();
    let mut sic21_curve = Vec::new();
    let mut ne_cloud: Vec<[f64; 2]> = Vec::new();
    for split in &splits {
        let (sud, s12r, s21r) = rates_at(split);
        let points = [[sud[0], sud[1]], [s12r[0], s12r[1]], [s21r[0], s21r[1]]];
        if binding {
            sud_curve.push(points[0]);
            sic12_curve.push(points[1]);
            sic21_curve.push(points[2]);
        }
        ne_cloud.extend(points);
    }

    let scene = RegionScene {
        b,
        b_ind,
        b_coop,
        binding,
        frontier: frontier(&snr, &splits, 160),
        sud_point: [sud_star[0], sud_star[1]],
        sic_points: [
            [sic12_star[0], sic12_star[1]],
            [sic21_star[0], sic21_star[1]],
        ],
        sud_curve,
        sic_curves: [sic12_curve, sic21_curve],
        hull: convex_hull_2d(ne_cloud),
    };
    Ok(serde_json::to_string(&scene).unwrap())
}

#[derive(Serialize)]
struct DynamicsScene {
    trajectory: Vec<Vec<f64>>,
    rates: Vec<f64>,
    energy: f64,
    converged: bool,
    rounds: usize,
    eta_ne: bool,
    max_gain: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[allow(clippy::too_many_arguments)]
fn dynamics_trace_impl(
    s11: f64,
    s12: f64,
    s21: f64,
    s22: f64,
    b: f64,
    beta1: f64,
    beta2: f64,
    sic_order: i32,
) -> Result<String, String> {
    let snr = snr_k2(s11, s12, s21, s22)?;
    let atom = match sic_order {
        0 => AtomicDecoder::Sud,
        1 => AtomicDecoder::Sic(vec![0, 1]),
        2 => AtomicDecoder::Sic(vec![1, 0]),
        _ => return Err("decoder selector must be 0 (SUD), 1 or 2 (SIC orders)".into()),
    };
    let params = GameParams::new(b, 0.01).map_err(|e| e.to_string())?;
    let start = PowerSplit::new(vec![beta1, beta2]).map_err(|e| e.to_string())?;
    let spec = DecoderSpec::Atomic(atom.clone());

    let scene = match best_response_dynamics(&snr, &params, &spec, start.clone(), 64) {
        Ok(result) => {
            let terminal = result.trajectory.last().unwrap().clone();
            let rates = match &atom {
                AtomicDecoder::Sud => ne_rates_sud(&snr, &terminal),
                AtomicDecoder::Sic(order) => ne_rates_sic(&snr, &terminal, order).unwrap(),
            };
            let energy = snr.energy_max(&terminal);
            let point = EquilibriumPoint {
                rates: RateTuple::new(rates.clone(), energy.max(b)).map_err(|e| e.to_string())?,
                split: terminal,
                decoder: atom,
            };
            let report =
                is_eta_ne(&snr, &params, &point, DEFAULT_TOL).map_err(|e| e.to_string())?;
            DynamicsScene {
                trajectory: result
                    .trajectory
                    .iter()
                    .map(|s| s.beta().to_vec())
                    .collect(),
                rates,
                energy,
                converged: result.converged,
                rounds: result.rounds,
                eta_ne: report.is_equilibrium,
                max_gain: report.max_gain,
                error: None,
            }
        }
        Err(e @ Error::DynamicsInfeasible { .. }) => DynamicsScene {
            trajectory: vec![start.beta().to_vec()],
            rates: vec![0.0, 0.0],
            energy: snr.energy_max(&start),
            converged: false,
            rounds: 0,
            eta_ne: false,
            max_gain: 0.0,
            error: Some(e.to_string()),
        },
        Err(e) => return Err(e.to_string()),
    };
    Ok(serde_json::to_string(&scene).unwrap())
}

fn bsc_curve_impl(p: f64, points: usize) -> Result<String, String> {
    let curve = siet_core::bsc::bsc_curve(p, points).map_err(|e| e.to_string())?;
    let pairs: Vec<[f64; 2]> = curve.into_iter().map(|(b, r)| [b, r]).collect();
    Ok(serde_json::to_string(&pairs).unwrap())
}

/// Rate-plane scene for a two-user channel at energy demand `b`.
#[wasm_bindgen]
pub fn region_scene(s11: f64, s12: f64, s21: f64, s22: f64, b: f64) -> Result<String, JsValue> {
    region_scene_impl(s11, s12, s21, s22, b).map_err(|e| JsValue::from_str(&e))
}

/// Round-robin best-response play from `(beta1, beta2)`; decoder selector:
/// 0 = SUD, 1 = SIC user 1 first, 2 = SIC user 2 first.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn dynamics_trace(
    s11: f64,
    s12: f64,
    s21: f64,
    s22: f64,
    b: f64,
    beta1: f64,
    beta2: f64,
    sic_order: i32,
) -> Result<String, JsValue> {
    dynamics_trace_impl(s11, s12, s21, s22, b, beta1, beta2, sic_order)
        .map_err(|e| JsValue::from_str(&e))
}

/// Information-energy capacity function of a BSC with crossover `p`.
#[wasm_bindgen]
pub fn bsc_curve_points(p: f64, points: usize) -> Result<String, JsValue> {
    bsc_curve_impl(p, points).map_err(|e| JsValue::from_str(&e))
}
