//! Scalar binary quantization index modulation with dither.
//!
//! Bit `b` is carried by snapping a scalar onto the lattice
//! `d_b + k * delta`, with dithers `d_0 = +delta / 4` and `d_1 = -delta / 4`.
//! The two lattices interleave at spacing `delta / 2`, so a detector picks the
//! bit whose lattice is nearer.
//!
//! Rounding is half-away-from-zero (`f64::round`) on every platform.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerParams {
    delta: f64,
}

impl QuantizerParams {
    pub fn new(delta: f64) -> Result<Self> {
        if delta > 0.0 && delta.is_finite() {
            Ok(Self { delta })
        } else {
            Err(Error::InvalidParameter(format!("quantization step must be positive, got {delta}")))
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Lattice offset for bit `b`.
    pub fn dither(&self, bit: bool) -> f64 {
        if bit {
            -self.delta / 4.0
        } else {
            self.delta / 4.0
        }
    }
}

/// `Q_b(x) = delta * round((x - d_b) / delta) + d_b`.
pub fn quantize_bit(x: f64, bit: bool, q: QuantizerParams) -> f64 {
    let d = q.dither(bit);
    q.delta * ((x - d) / q.delta).round() + d
}

/// The bit whose lattice lies nearest to `x`; exact ties decode as `false`.
pub fn detect_bit(x: f64, q: QuantizerParams) -> bool {
    let d0 = (x - quantize_bit(x, false, q)).abs();
    let d1 = (x - quantize_bit(x, true, q)).abs();
    d1 < d0
}

/// The `bit`-lattice point nearest to `x` inside `[lo, hi]`.
///
/// Any interval of length `2 * delta` holds at least two points of each
/// lattice, so a point always exists.
pub fn quantize_bit_bounded(x: f64, bit: bool, q: QuantizerParams, lo: f64, hi: f64) -> Result<f64> {
    if !(hi - lo >= 2.0 * q.delta) {
        return Err(Error::InvalidParameter(format!(
            "interval [{lo}, {hi}] is narrower than 2 * delta = {}",
            2.0 * q.delta
        )));
    }
    let mut y = quantize_bit(x, bit, q);
    if y < lo {
        y += q.delta * ((lo - y) / q.delta).ceil();
    } else if y > hi {
        y -= q.delta * ((y - hi) / q.delta).ceil();
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(delta: f64) -> QuantizerParams {
        QuantizerParams::new(delta).unwrap()
    }

    #[test]
    fn hand_values() {
        assert_relative_eq!(quantize_bit(1.0, false, p(0.08)), 0.98, epsilon = 1e-12);
        assert_relative_eq!(quantize_bit(1.0, true, p(0.08)), 1.02, epsilon = 1e-12);
        assert_relative_eq!(quantize_bit(0.02, false, p(0.08)), 0.02, epsilon = 1e-15);
        assert!(!detect_bit(0.98, p(0.08)));
        assert!(detect_bit(1.02, p(0.08)));
    }

    #[test]
    fn tie_decodes_as_zero() {
        // 0.5 sits exactly between 0.25 + k (bit 0) and 0.75 + k (bit 1) for delta = 1.
        assert!(!detect_bit(0.5, p(1.0)));
        assert!(!detect_bit(0.0, p(1.0)));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(QuantizerParams::new(0.0).is_err());
        assert!(QuantizerParams::new(-1.0).is_err());
        assert!(QuantizerParams::new(f64::NAN).is_err());
        assert!(quantize_bit_bounded(0.5, false, p(0.1), 0.45, 0.6).is_err());
    }

    #[test]
    fn bounded_boundary_case() {
        let q = p(0.08);
        // Nearest bit-0 point to 1.0 is 0.98, below lo = 0.99; next is 1.06.
        let y = quantize_bit_bounded(1.0, false, q, 0.99, 1.2).unwrap();
        // Scan the lattice for the nearest in-range point.
        let oracle = (-100..100)
            .map(|k| 0.02 + k as f64 * 0.08)
            .filter(|&c| (0.99..=1.2).contains(&c))
            .min_by(|a, b| (a - 1.0f64).abs().total_cmp(&(b - 1.0f64).abs()))
            .unwrap();
        assert_relative_eq!(y, oracle, epsilon = 1e-12);
        assert_relative_eq!(y, 1.06, epsilon = 1e-12);
        assert!(!detect_bit(y, q));
        // Interior: same as unbounded.
        assert_eq!(quantize_bit_bounded(1.0, true, q, 0.5, 1.5).unwrap(), quantize_bit(1.0, true, q));
    }

    #[test]
    fn lattices_interleave_at_half_step() {
        let q = p(0.08);
        let mut pts: Vec<(f64, bool)> = Vec::new();
        for k in -20..20 {
            let x = k as f64 * 0.08;
            pts.push((quantize_bit(x, false, q), false));
            pts.push((quantize_bit(x, true, q), true));
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12);
        for w in pts.windows(2) {
            assert_ne!(w[0].1, w[1].1);
            assert_relative_eq!(w[1].0 - w[0].0, 0.04, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn round_trip_distortion_and_idempotence(x in -50.0f64..50.0, bit: bool, delta in 1e-3f64..1.0) {
            let q = p(delta);
            let y = quantize_bit(x, bit, q);
            prop_assert!((y - x).abs() <= 0.75 * delta + 1e-12);
            prop_assert_eq!(detect_bit(y, q), bit);
            prop_assert!((quantize_bit(y, bit, q) - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }

        #[test]
        fn shift_by_whole_steps(x in -5.0f64..5.0, bit: bool, k in -50i32..50) {
            let q = p(0.08);
            let shifted = quantize_bit(x + k as f64 * 0.08, bit, q);
            prop_assert!((shifted - (quantize_bit(x, bit, q) + k as f64 * 0.08)).abs() < 1e-12);
        }

        #[test]
        fn bounded_stays_inside_and_decodes(
            lo in -2.0f64..2.0, width in 0.0f64..1.0, t in 0.0f64..=1.0, bit: bool, delta in 0.01f64..0.2,
        ) {
            let q = p(delta);
            let hi = lo + 2.0 * delta + width;
            let x = lo + t * (hi - lo);
            let y = quantize_bit_bounded(x, bit, q, lo, hi).unwrap();
            prop_assert!(y >= lo - 1e-12 && y <= hi + 1e-12);
            prop_assert_eq!(detect_bit(y, q), bit);
        }
    }
}
