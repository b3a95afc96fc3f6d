//! Information-energy capacity function of the binary symmetric channel,
//! the single-user warm-up for the trade-off studied on the Gaussian MAC.
//!
//! Symbol `1` delivers one energy unit, symbol `0` none. Capacity-achieving
//! equiprobable inputs already deliver energy rate 1/2, so a demand
//! `b <= 1/2` costs nothing and the curve sits flat at `1 - H2(p)`. Beyond
//! that the input distribution must skew towards `1`, and the best rate
//! drops to `H2(b) - H2(p)`, hitting zero at the all-ones input `b = 1 - p`.

use crate::error::{Error, Result};

/// Binary entropy in bits, with the convention `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2()) - (1.0 - p) * (1.0 - p).log2()
}

/// Crossover probability and energy demand for a BSC link.
#[derive(Debug, Clone, Copy)]
pub struct BscParams {
    p: f64,
    b: f64,
}

impl BscParams {
    /// Requires `0 <= p <= 1/2` and `0 <= b <= 1 - p`.
    pub fn new(p: f64, b: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&p) || !(0.0..=1.0 - p).contains(&b) {
            return Err(Error::BscOutOfRange { p, b });
        }
        Ok(Self { p, b })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

/// Largest information rate of a BSC under a minimum energy rate `b`.
pub fn bsc_info_energy_capacity(params: BscParams) -> f64 {
    if params.b <= 0.5 {
        1.0 - binary_entropy(params.p)
    } else if params.b >= 1.0 - params.p {
        // All-ones input: the rate is zero by definition, not merely the
        // rounded difference of two entropies.
        0.0
    } else {
        binary_entropy(params.b) - binary_entropy(params.p)
    }
}

/// Samples the capacity function over the full demand range `[0, 1 - p]`.
pub fn bsc_curve(p: f64, points: usize) -> Result<Vec<(f64, f64)>> {
    BscParams::new(p, 0.0)?;
    let top = 1.0 - p;
    let mut out = Vec::with_capacity(points);
    for i in 0..points {
        let b = if points == 1 {
            0.0
        } else {
            top * i as f64 / (points - 1) as f64
        };
        out.push((b, bsc_info_energy_capacity(BscParams::new(p, b)?)));
    }
    Ok(out)
}

/// Renders a sampled curve as CSV with header `b,rate`.
pub fn bsc_csv(curve: &[(f64, f64)]) -> String {
    let mut out = String::from("b,rate\n");
    for (b, r) in curve {
        out.push_str(&format!("{b},{r}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAP_015: f64 = 0.390159695283600; // 1 - H2(0.15)

    #[test]
    fn flat_segment_below_half() {
        let v = bsc_info_energy_capacity(BscParams::new(0.15, 0.3).unwrap());
        assert!((v - CAP_015).abs() < 1e-12);
        let v0 = bsc_info_energy_capacity(BscParams::new(0.15, 0.0).unwrap());
        assert_eq!(v, v0);
    }

    #[test]
    fn zero_at_maximal_demand() {
        // H2(0.85) - H2(0.15) cancels exactly.
        let v = bsc_info_energy_capacity(BscParams::new(0.15, 0.85).unwrap());
        assert_eq!(v, 0.0);
    }

    #[test]
    fn decreasing_segment_value() {
        let v = bsc_info_energy_capacity(BscParams::new(0.15, 0.7).unwrap());
        assert!((v - 0.271450594514292).abs() < 1e-12);
    }

    #[test]
    fn noiseless_channel() {
        assert_eq!(
            bsc_info_energy_capacity(BscParams::new(0.0, 0.3).unwrap()),
            1.0
        );
        let v = bsc_info_energy_capacity(BscParams::new(0.0, 0.9).unwrap());
        assert!((v - binary_entropy(0.9)).abs() < 1e-15);
        let end = bsc_info_energy_capacity(BscParams::new(0.0, 1.0).unwrap());
        assert_eq!(end, 0.0);
    }

    #[test]
    fn useless_channel_is_identically_zero() {
        for i in 0..=10 {
            let b = 0.05 * i as f64;
            let v = bsc_info_energy_capacity(BscParams::new(0.5, b).unwrap());
            assert!(v.abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(
            BscParams::new(0.15, 0.86),
            Err(Error::BscOutOfRange { .. })
        ));
        assert!(matches!(
            BscParams::new(0.6, 0.1),
            Err(Error::BscOutOfRange { .. })
        ));
    }

    #[test]
    fn curve_is_monotone_non_increasing() {
        let curve = bsc_curve(0.15, 200).unwrap();
        assert_eq!(curve.len(), 200);
        for w in curve.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-12);
        }
        assert_eq!(curve.last().unwrap().1, 0.0);
    }
}
