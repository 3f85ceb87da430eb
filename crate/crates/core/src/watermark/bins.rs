use crate::error::{Error, Result};

/// `count` contiguous equal-width half-open norm intervals starting at `lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBins {
    pub lo: f64,
    pub width: f64,
    pub count: usize,
}

impl NormBins {
    /// Index of the bin holding `norm`; values outside the range clamp to the
    /// first or last bin.
    pub fn bin_of(&self, norm: f64) -> usize {
        let i = ((norm - self.lo) / self.width).floor();
        if i < 0.0 {
            0
        } else {
            (i as usize).min(self.count - 1)
        }
    }

    pub fn bounds(&self, i: usize) -> (f64, f64) {
        (self.lo + i as f64 * self.width, self.lo + (i + 1) as f64 * self.width)
    }

    pub fn intervals(&self) -> Vec<(f64, f64)> {
        (0..self.count).map(|i| self.bounds(i)).collect()
    }
}

/// Splits `[min - delta, max + delta]` of the carrier norms into `m` equal
/// bins. Each bin must be at least `2 * delta` wide so that both QIM lattices
/// have a point inside it.
pub fn assign_bins(norms: &[f64], m: usize, delta: f64) -> Result<NormBins> {
    if norms.is_empty() || m == 0 {
        return Err(Error::InvalidParameter("need at least one norm and one bin".into()));
    }
    let min = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let max = norms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = min - delta;
    let span = (max + delta) - lo;
    let width = span / m as f64;
    if width < 2.0 * delta {
        return Err(Error::Capacity { span, bins: m, min_width: 2.0 * delta });
    }
    Ok(NormBins { lo, width, count: m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_bins_over_unit_span() {
        let b = assign_bins(&[0.5, 1.2, 1.5, 0.9], 2, 0.004).unwrap();
        let iv = b.intervals();
        assert_relative_eq!(iv[0].0, 0.496, epsilon = 1e-12);
        assert_relative_eq!(iv[0].1, 1.0, epsilon = 1e-12);
        assert_relative_eq!(iv[1].1, 1.504, epsilon = 1e-12);
        assert_eq!(b.bin_of(0.5), 0);
        assert_eq!(b.bin_of(1.5), 1);
    }

    #[test]
    fn single_bin_covers_everything() {
        let b = assign_bins(&[0.3, 0.31], 1, 0.004).unwrap();
        assert_eq!(b.bin_of(0.3), 0);
        assert_eq!(b.bin_of(0.31), 0);
    }

    #[test]
    fn narrow_span_is_a_capacity_error() {
        // span 0.01 + 2 * 0.004 = 0.018 over 4 bins = 0.0045 < 0.008
        assert!(matches!(assign_bins(&[1.0, 1.01], 4, 0.004), Err(Error::Capacity { .. })));
    }

    #[test]
    fn bins_are_contiguous_and_ordered() {
        let b = assign_bins(&[0.1, 2.0], 13, 0.01).unwrap();
        for w in b.intervals().windows(2) {
            assert_eq!(w[0].1, w[1].0);
            assert!(w[0].0 < w[1].0);
        }
    }
}
