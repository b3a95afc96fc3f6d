//! Per-user information rates induced by a power split, for single-user
//! decoding and successive interference cancellation, plus the inverse maps
//! (rates back to the split that produces them).
//!
//! With `s_i = beta_i * SNR_1i`:
//!
//! * SUD: `R_i = 1/2 log2(1 + s_i / (1 + sum_{j != i} s_j))`; every other
//!   user is noise.
//! * SIC with decoding order `pi`: `R_pi(i) = 1/2 log2(1 + s_pi(i) /
//!   (1 + sum_{j > i} s_pi(j)))`; users decoded earlier see only the
//!   not-yet-decoded ones as interference. These are exactly the corner
//!   points of the dominant face of the rate polytope.

/// Effective information powers `beta_i * SNR_1i`.
fn info_powers(snr1: &[f64], beta: &[f64]) -> Vec<f64> {
    snr1.iter().zip(beta).map(|(s, b)| s * b).collect()
}

pub(crate) fn sud_rates(snr1: &[f64], beta: &[f64]) -> Vec<f64> {
    let s = info_powers(snr1, beta);
    let total: f64 = s.iter().sum();
    s.iter()
        .map(|&si| 0.5 * (1.0 + si / (1.0 + (total - si))).log2())
        .collect()
}

pub(crate) fn sic_rates(snr1: &[f64], beta: &[f64], order: &[usize]) -> Vec<f64> {
    let s = info_powers(snr1, beta);
    let mut rates = vec![0.0; s.len()];
    let mut interference = 0.0;
    // Walk the order backwards: the last-decoded user sees no interference.
    for &user in order.iter().rev() {
        rates[user] = 0.5 * (1.0 + s[user] / (1.0 + interference)).log2();
        interference += s[user];
    }
    rates
}

/// Outcome of inverting a rate map: the split coordinates that the rates pin
/// down, with `None` for users whose SNR to the receiver is zero (their rate
/// must be zero and their split is unconstrained by the rates).
pub(crate) type PartialSplit = Vec<Option<f64>>;

/// Slack allowed when an inverted coordinate lands marginally outside [0, 1].
const INVERT_SLACK: f64 = 1e-9;

fn clamp_unit(x: f64) -> Option<f64> {
    if !x.is_finite() || !(-INVERT_SLACK..=1.0 + INVERT_SLACK).contains(&x) {
        None
    } else {
        Some(x.clamp(0.0, 1.0))
    }
}

/// Inverts the SUD rate map. Returns `None` when no split in [0,1]^K can
/// produce `rates`.
///
/// Writing `g_i = 2^{2 R_i} - 1` and `T = 1 + sum_j s_j`, the SUD formula
/// reads `s_i = g_i (T - s_i)`, so `s_i = T g_i / (1 + g_i)` and summing
/// gives `T = 1 / (1 - sum_j g_j / (1 + g_j))`.
pub(crate) fn invert_sud(snr1: &[f64], rates: &[f64], rate_tol: f64) -> Option<PartialSplit> {
    let mut frac_sum = 0.0;
    let mut fracs = Vec::with_capacity(rates.len());
    for (&snr, &r) in snr1.iter().zip(rates) {
        if r < -rate_tol {
            return None;
        }
        if snr <= 0.0 {
            // No path to the receiver: only a zero rate is producible.
            if r.abs() > rate_tol {
                return None;
            }
            fracs.push(None);
            continue;
        }
        let g = (2.0f64).powf(2.0 * r.max(0.0)) - 1.0;
        let frac = g / (1.0 + g);
        frac_sum += frac;
        fracs.push(Some((g, frac)));
    }
    if frac_sum >= 1.0 {
        return None; // rates exceed what any split can deliver
    }
    let total = 1.0 / (1.0 - frac_sum);
    let mut beta = Vec::with_capacity(rates.len());
    for (f, &snr) in fracs.iter().zip(snr1) {
        match f {
            None => beta.push(None),
            Some((_, frac)) => beta.push(Some(clamp_unit(total * frac / snr)?)),
        }
    }
    Some(beta)
}

/// Inverts the SIC rate map for a fixed decoding order, starting from the
/// last-decoded user and accumulating interference.
pub(crate) fn invert_sic(
    snr1: &[f64],
    rates: &[f64],
    order: &[usize],
    rate_tol: f64,
) -> Option<PartialSplit> {
    let mut beta: PartialSplit = vec![None; rates.len()];
    let mut interference = 0.0;
    for &user in order.iter().rev() {
        let r = rates[user];
        if r < -rate_tol {
            return None;
        }
        if snr1[user] <= 0.0 {
            if r.abs() > rate_tol {
                return None;
            }
            continue; // beta[user] stays unconstrained
        }
        let g = (2.0f64).powf(2.0 * r.max(0.0)) - 1.0;
        let s = g * (1.0 + interference);
        beta[user] = Some(clamp_unit(s / snr1[user])?);
        interference += s;
    }
    Some(beta)
}

/// Enumerates all permutations of `0..k` in lexicographic order.
pub(crate) fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        // next_permutation
        let Some(i) = (0..k.saturating_sub(1))
            .rev()
            .find(|&i| current[i] < current[i + 1])
        else {
            break;
        };
        let j = (i + 1..k).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sud_matches_closed_form() {
        let r = sud_rates(&[10.0, 10.0], &[1.0, 1.0]);
        let expected = 0.5 * (21.0f64 / 11.0).log2();
        assert!((r[0] - expected).abs() < 1e-15);
        assert!((r[1] - expected).abs() < 1e-15);
    }

    #[test]
    fn sic_last_decoded_sees_no_interference() {
        let r = sic_rates(&[10.0, 10.0], &[1.0, 1.0], &[0, 1]);
        assert!((r[0] - 0.5 * (21.0f64 / 11.0).log2()).abs() < 1e-15);
        assert!((r[1] - 0.5 * 11.0f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn inversion_round_trips() {
        let snr1 = [10.0, 3.0, 0.7];
        let beta = [0.4, 0.9, 0.25];
        let r = sud_rates(&snr1, &beta);
        let back = invert_sud(&snr1, &r, 1e-12).unwrap();
        for (b, est) in beta.iter().zip(&back) {
            assert!((b - est.unwrap()).abs() < 1e-12);
        }
        let order = [2, 0, 1];
        let r = sic_rates(&snr1, &beta, &order);
        let back = invert_sic(&snr1, &r, &order, 1e-12).unwrap();
        for (b, est) in beta.iter().zip(&back) {
            assert!((b - est.unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn inversion_rejects_unreachable_rates() {
        // Sum rate above the full-cooperation bound cannot be inverted.
        assert!(invert_sud(&[10.0, 10.0], &[2.0, 2.0], 1e-12).is_none());
        // A positive rate through a zero-SNR link is impossible.
        assert!(invert_sud(&[0.0, 10.0], &[0.1, 0.1], 1e-12).is_none());
        assert!(invert_sic(&[10.0, 10.0], &[0.1, 3.0], &[0, 1], 1e-12).is_none());
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(2).len(), 2);
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(4).len(), 24);
    }
}
