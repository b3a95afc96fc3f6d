//! Equilibrium-side invariants: rate algebra, manifold solvers, soundness
//! of solver-produced equilibria and their containment in the capacity
//! region.

mod common;

use common::{random_demand, random_snr, rng};
use proptest::prelude::*;
use rand::Rng;
use siet_core::equilibria::{
    best_response_dynamics, directional_split_for_demand, is_eta_ne, ne_component_samples,
    ne_rates_sic, ne_rates_sud, ne_region_contains, uniform_split_for_demand, AtomicDecoder,
    DecoderSpec, EquilibriumPoint, GameParams,
};
use siet_core::regions::capacity_contains;
use siet_core::{GridSpec, PowerSplit, RateTuple, SnrTable, DEFAULT_TOL};

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
        }
        for i in 0..rest.len() {
            let u = rest.remove(i);
            prefix.push(u);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(i, u);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..k).collect(), &mut out);
    out
}

proptest! {
    // SIC rates telescope: the sum is the full-set bound, independent of
    // the decoding order.
    #[test]
    fn sic_sum_rate_is_order_invariant(
        snr1 in prop::collection::vec(0.1f64..100.0, 2..=4),
        seed in any::<u64>(),
    ) {
        let k = snr1.len();
        let snr = SnrTable::new(snr1, vec![1.0; k]).unwrap();
        let mut r = common::rng(seed);
        let split = common::random_split(&mut r, k);
        let expected = {
            let total: f64 = split
                .beta()
                .iter()
                .zip(snr.snr1())
                .map(|(b, s)| b * s)
                .sum();
            0.5 * (1.0 + total).log2()
        };
        for order in permutations(k) {
            let sum: f64 = ne_rates_sic(&snr, &split, &order).unwrap().iter().sum();
            prop_assert!((sum - expected).abs() <= 1e-9);
        }
    }

    // The first-decoded SIC user faces exactly the SUD interference set.
    #[test]
    fn first_decoded_matches_sud(
        snr1 in prop::collection::vec(0.1f64..100.0, 2..=4),
        seed in any::<u64>(),
    ) {
        let k = snr1.len();
        let snr = SnrTable::new(snr1, vec![1.0; k]).unwrap();
        let mut r = common::rng(seed);
        let split = common::random_split(&mut r, k);
        let sud = ne_rates_sud(&snr, &split);
        for order in permutations(k) {
            let sic = ne_rates_sic(&snr, &split, &order).unwrap();
            let first = order[0];
            prop_assert!((sic[first] - sud[first]).abs() <= 1e-12 * sud[first].max(1.0));
        }
    }

    // Interference cancellation can only help.
    #[test]
    fn sic_dominates_sud(
        snr1 in prop::collection::vec(0.1f64..100.0, 2..=4),
        seed in any::<u64>(),
    ) {
        let k = snr1.len();
        let snr = SnrTable::new(snr1, vec![1.0; k]).unwrap();
        let mut r = common::rng(seed);
        let split = common::random_split(&mut r, k);
        let sud = ne_rates_sud(&snr, &split);
        for order in permutations(k) {
            let sic = ne_rates_sic(&snr, &split, &order).unwrap();
            for i in 0..k {
                prop_assert!(sic[i] >= sud[i] - 1e-12);
            }
        }
    }
}

#[test]
fn manifold_solutions_close_the_energy_constraint() {
    let mut rng = rng(301);
    for _ in 0..300 {
        let k = rng.random_range(2..=4);
        let snr = random_snr(&mut rng, k);
        let (b_ind, b_coop) = (snr.b_ind(), snr.b_coop());
        let b = rng.random_range(b_ind..=b_coop);
        if b <= b_ind {
            continue;
        }
        let uniform = uniform_split_for_demand(&snr, b).unwrap();
        assert!((snr.energy_max(&uniform) - b).abs() <= 1e-10 * b.max(1.0));

        let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..=1.0)).collect();
        let directional = directional_split_for_demand(&snr, b, &w).unwrap();
        assert!((snr.energy_max(&directional) - b).abs() <= 1e-10 * b.max(1.0));
    }
}

/// Solver-produced profiles, paired with their decoder rates.
fn solver_equilibrium(
    snr: &SnrTable,
    b: f64,
    decoder: AtomicDecoder,
    split: PowerSplit,
) -> EquilibriumPoint {
    let rates = match &decoder {
        AtomicDecoder::Sud => ne_rates_sud(snr, &split),
        AtomicDecoder::Sic(order) => ne_rates_sic(snr, &split, order).unwrap(),
    };
    let b_rate = if b <= snr.b_ind() { snr.b_ind() } else { b };
    EquilibriumPoint {
        rates: RateTuple::new(rates, b_rate).unwrap(),
        split,
        decoder,
    }
}

#[test]
fn solver_equilibria_are_sound_and_inside_capacity() {
    let mut rng = rng(302);
    for round in 0..250 {
        let k = rng.random_range(2..=4);
        let snr = random_snr(&mut rng, k);
        let b = random_demand(&mut rng, &snr);
        let params = GameParams::new(b, 1e-6).unwrap();

        let splits = [
            uniform_split_for_demand(&snr, b).unwrap(),
            directional_split_for_demand(
                &snr,
                b,
                &(0..k)
                    .map(|_| rng.random_range(0.05..=1.0))
                    .collect::<Vec<_>>(),
            )
            .unwrap(),
        ];
        for split in splits {
            let decoder = if round % 2 == 0 {
                AtomicDecoder::Sud
            } else {
                let orders = permutations(k);
                AtomicDecoder::Sic(orders[rng.random_range(0..orders.len())].clone())
            };
            let point = solver_equilibrium(&snr, b, decoder, split);
            let report = is_eta_ne(&snr, &params, &point, DEFAULT_TOL).unwrap();
            assert!(
                report.is_equilibrium,
                "solver point rejected: {:?} (b = {b}, gain = {})",
                report.failure, report.max_gain
            );
            // The equilibrium characterization and the deviation oracle
            // agree; its tuple must also be achievable centrally.
            let witness = capacity_contains(&snr, b, &point.rates, &GridSpec::for_k(k)).unwrap();
            assert!(
                witness.is_some(),
                "equilibrium tuple escaped the capacity region (b = {b})"
            );
        }
    }
}

#[test]
fn membership_accepts_every_component_sample() {
    let mut rng = rng(303);
    for _ in 0..40 {
        let k = rng.random_range(2..=3);
        let snr = random_snr(&mut rng, k);
        let b = random_demand(&mut rng, &snr);
        let params = GameParams::new(b, 1e-6).unwrap();
        let decoder = AtomicDecoder::Sic(permutations(k)[1].clone());
        for s in ne_component_samples(&snr, &params, &decoder, 12).unwrap() {
            assert!(ne_region_contains(
                &snr,
                &params,
                &s.point,
                &DecoderSpec::Atomic(s.decoder.clone()),
                DEFAULT_TOL
            )
            .unwrap());
        }
    }
}

#[test]
fn time_share_accepts_cross_decoder_mixtures() {
    let mut rng = rng(304);
    let ts = DecoderSpec::TimeShare(vec![
        (AtomicDecoder::Sud, 0.5),
        (AtomicDecoder::Sic(vec![0, 1]), 0.5),
    ]);
    for _ in 0..40 {
        let snr = random_snr(&mut rng, 2);
        let b = random_demand(&mut rng, &snr);
        let params = GameParams::new(b, 1e-6).unwrap();
        let a = ne_component_samples(&snr, &params, &AtomicDecoder::Sud, 8).unwrap();
        let c = ne_component_samples(&snr, &params, &AtomicDecoder::Sic(vec![0, 1]), 8).unwrap();
        let lambda: f64 = rng.random_range(0.0..=1.0);
        let pa = &a[rng.random_range(0..a.len())].point;
        let pc = &c[rng.random_range(0..c.len())].point;
        let mix: Vec<f64> = pa
            .rates()
            .iter()
            .zip(pc.rates())
            .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
            .collect();
        let b_rate = lambda * pa.b_rate() + (1.0 - lambda) * pc.b_rate();
        let pt = RateTuple::new(mix, b_rate).unwrap();
        assert!(
            ne_region_contains(&snr, &params, &pt, &ts, DEFAULT_TOL).unwrap(),
            "convex combination rejected (b = {b})"
        );
    }
}

#[test]
fn dynamics_terminal_is_equilibrium() {
    let mut rng = rng(305);
    for _ in 0..60 {
        let k = rng.random_range(2..=3);
        let snr = random_snr(&mut rng, k);
        let b = random_demand(&mut rng, &snr);
        let params = GameParams::new(b, 1e-6).unwrap();
        // Cooperative init guarantees a feasible starting profile.
        let start = uniform_split_for_demand(&snr, b).unwrap();
        let result = best_response_dynamics(&snr, &params, &DecoderSpec::sud(), start, 64).unwrap();
        assert!(result.converged, "dynamics failed to converge (b = {b})");
        let split = result.trajectory.last().unwrap().clone();
        let rates = ne_rates_sud(&snr, &split);
        let b_rate = snr.energy_max(&split).min(snr.b_ind()).max(b);
        let point = EquilibriumPoint {
            rates: RateTuple::new(rates, b_rate).unwrap(),
            split,
            decoder: AtomicDecoder::Sud,
        };
        let report = is_eta_ne(&snr, &params, &point, DEFAULT_TOL).unwrap();
        assert!(
            report.is_equilibrium,
            "terminal profile not an equilibrium: {:?}",
            report.failure
        );
    }
}
